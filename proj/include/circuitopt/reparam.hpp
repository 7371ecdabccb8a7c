#pragma once

#include <cmath>

#include "circuitopt/error.hpp"

namespace circuitopt {

/// Smooth bound-respecting reparameterization. Element values and fluxes map
/// through log x = mid + half cos(alpha) so optimization over alpha is
/// unconstrained; gate charges use the same cosine map on a linear scale
/// (their range includes zero, where a log map is undefined).
struct ParamMap {
    enum class Scale { log_cosine, linear_cosine };

    Scale scale = Scale::log_cosine;
    double lo = 0.0;
    double hi = 1.0;

    static ParamMap log_map(double lo, double hi) {
        if (!(lo > 0.0) || !(hi > lo))
            throw ConfigError("log map requires 0 < lo < hi");
        return {Scale::log_cosine, lo, hi};
    }
    static ParamMap linear_map(double lo, double hi) {
        if (!(hi > lo)) throw ConfigError("linear map requires lo < hi");
        return {Scale::linear_cosine, lo, hi};
    }

    double mid() const {
        return scale == Scale::log_cosine ? 0.5 * (std::log(hi) + std::log(lo))
                                          : 0.5 * (hi + lo);
    }
    double half() const {
        return scale == Scale::log_cosine ? 0.5 * (std::log(hi) - std::log(lo))
                                          : 0.5 * (hi - lo);
    }

    /// Principal branch alpha in [0, pi]; alpha = 0 maps to hi, pi to lo.
    double to_alpha(double x) const {
        if (x < lo || x > hi)
            throw ConfigError("value " + std::to_string(x) + " outside [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
        const double t = scale == Scale::log_cosine ? std::log(x) : x;
        const double c = (t - mid()) / half();
        return std::acos(std::min(1.0, std::max(-1.0, c)));
    }

    double from_alpha(double alpha) const {
        const double t = mid() + half() * std::cos(alpha);
        return scale == Scale::log_cosine ? std::exp(t) : t;
    }

    /// dx/dalpha at the given alpha; zero at the cosine endpoints.
    double dx_dalpha(double alpha) const {
        const double x = from_alpha(alpha);
        const double d = -half() * std::sin(alpha);
        return scale == Scale::log_cosine ? x * d : d;
    }

    bool saturated(double alpha, double tol = 1e-12) const {
        return std::abs(std::sin(alpha)) < tol;
    }
};

/// Chain-rule factor dL/dalpha = dL/dx * dx/dalpha.
inline double reparam_chain(double dl_dx, const ParamMap& map, double alpha) {
    return dl_dx * map.dx_dalpha(alpha);
}

} // namespace circuitopt
