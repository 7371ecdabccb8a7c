#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "circuitopt/circuit.hpp"
#include "circuitopt/constants.hpp"
#include "circuitopt/hilbert.hpp"
#include "circuitopt/mode_transform.hpp"
#include "circuitopt/spectrum.hpp"

namespace circuitopt {

namespace truncation {

inline int round_up_to_odd(int m) { return (m % 2 == 0) ? m + 1 : m; }

/// Ground-state width of a charge mode in the number basis,
/// sigma = (E_J_eff / 8 E_C_eff)^(1/4).
inline double charge_sigma(double ej_over_8ec) {
    return std::pow(std::max(ej_over_8ec, 0.0), 0.25);
}

/// Charge truncation c = min(c_max, floor(3 sigma)), rounded up to odd.
inline int charge_truncation(double sigma, int c_max) {
    const int c = std::min(c_max, static_cast<int>(std::floor(3.0 * sigma)));
    return round_up_to_odd(std::max(c, 1));
}

/// Preliminary harmonic cutoffs h_i = floor((1/alpha_i) (K_h prod alpha)^(1/n)).
inline std::vector<int> preliminary_harmonic_cutoffs(const std::vector<double>& alpha,
                                                     double k_h) {
    const int n = static_cast<int>(alpha.size());
    double prod = 1.0;
    for (double a : alpha) prod *= a;
    const double common = std::pow(std::max(k_h, 1.0) * prod, 1.0 / n);
    std::vector<int> h(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        h[static_cast<std::size_t>(i)] = std::max(
            1, static_cast<int>(std::floor(common / alpha[static_cast<std::size_t>(i)])));
    return h;
}

/// Per-mode eigenvector profile: entry q is max_{other modes} |c|^2 over all
/// product-basis states whose local index in `mode` is q.
inline Eigen::VectorXd mode_magnitudes_sq(const Eigen::VectorXcd& vec,
                                          const HilbertConfig& config, int mode) {
    const int n = config.modes();
    std::vector<std::int64_t> stride(static_cast<std::size_t>(n), 1);
    for (int i = n - 2; i >= 0; --i)
        stride[static_cast<std::size_t>(i)] =
            stride[static_cast<std::size_t>(i + 1)] * config.trunc[static_cast<std::size_t>(i + 1)];
    const int m = config.trunc[static_cast<std::size_t>(mode)];
    Eigen::VectorXd mag = Eigen::VectorXd::Zero(m);
    for (std::int64_t s = 0; s < vec.size(); ++s) {
        const int q = static_cast<int>((s / stride[static_cast<std::size_t>(mode)]) % m);
        mag(q) = std::max(mag(q), std::abs(vec(s)));
    }
    return mag.cwiseProduct(mag);
}

/// Highest-index peak: squared magnitude above threshold with strictly
/// smaller neighbors. Falls back to the global maximum when none qualifies.
inline int highest_peak(const Eigen::VectorXd& mag2, double threshold = 1e-6) {
    const int m = static_cast<int>(mag2.size());
    int peak = -1;
    for (int q = 0; q + 1 < m; ++q) {
        if (mag2(q) < threshold) continue;
        const bool left_ok = (q == 0) || mag2(q - 1) < mag2(q);
        if (left_ok && mag2(q) > mag2(q + 1)) peak = q;
    }
    if (peak < 0) {
        Eigen::Index arg = 0;
        mag2.maxCoeff(&arg);
        peak = static_cast<int>(arg);
    }
    return peak;
}

/// Decay rate of log-squared magnitudes past the peak; NaN when fewer than
/// three usable points.
inline double fit_decay_rate(const Eigen::VectorXd& mag2, int peak) {
    std::vector<double> xs, ys;
    for (int q = peak + 1; q < mag2.size(); ++q) {
        if (mag2(q) < 1e-30) break;
        xs.push_back(static_cast<double>(q - peak));
        ys.push_back(std::log(mag2(q)));
    }
    if (xs.size() < 3) return std::numeric_limits<double>::quiet_NaN();
    const auto n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return std::max(-slope, 0.01);
}

} // namespace truncation

/// Equal allocation floor(K^(1/n)) per mode, charge modes rounded up to odd,
/// then trimmed until the product fits the budget.
inline HilbertConfig even_allocation(const ModeDecomposition& decomp, std::int64_t k_budget) {
    const int n = decomp.modes();
    if (k_budget < (std::int64_t{1} << n))
        throw ConfigError("Hilbert budget too small: K = " + std::to_string(k_budget));
    const int base = static_cast<int>(std::floor(
        std::pow(static_cast<double>(k_budget), 1.0 / n) + 1e-12));
    HilbertConfig cfg;
    cfg.n_harmonic = decomp.n_harmonic;
    for (int i = 0; i < n; ++i)
        cfg.trunc.push_back(i < decomp.n_harmonic ? base
                                                  : truncation::round_up_to_odd(base));
    while (cfg.dimension() > k_budget) {
        int arg = 0;
        for (int i = 1; i < n; ++i)
            if (cfg.trunc[static_cast<std::size_t>(i)] > cfg.trunc[static_cast<std::size_t>(arg)])
                arg = i;
        cfg.trunc[static_cast<std::size_t>(arg)] -= cfg.is_charge(arg) ? 2 : 1;
        if (cfg.trunc[static_cast<std::size_t>(arg)] < 1)
            throw ConfigError("cannot satisfy Hilbert budget");
    }
    cfg.validate();
    return cfg;
}

struct TruncationOptions {
    int c_max = 31;          // odd
    int proxy_state = 1;     // first excited state drives the harmonic fit
    double peak_threshold = 1e-6;
    std::int64_t k_max_build = 4'000'000;
    SolverOptions solver;
};

/// Truncation-number assignment heuristic: equal-allocation proxy
/// diagonalization, charge widths from the quadratic (transmon-like)
/// approximation, harmonic cutoffs from exponential eigenvector decay.
/// The result always satisfies prod(m_i) <= K.
inline HilbertConfig assign_truncations(const Circuit& circuit,
                                        const ModeDecomposition& decomp,
                                        std::int64_t k_budget,
                                        const TruncationOptions& opts = {}) {
    if (opts.c_max % 2 == 0) throw ConfigError("c_max must be odd");
    const int n = decomp.modes();
    const HilbertConfig even = even_allocation(decomp, k_budget);

    Spectrum proxy;
    try {
        OperatorSet ops(circuit, decomp, even, opts.k_max_build);
        Eigen::VectorXd ng = Eigen::VectorXd::Zero(decomp.n_charge);
        for (int j = 0; j < decomp.n_charge &&
                        j < static_cast<int>(circuit.gate_charges().size()); ++j)
            ng(j) = circuit.gate_charges()[static_cast<std::size_t>(j)];
        const SparseOperator h =
            assemble_hamiltonian(circuit, decomp, ops, circuit.flux_ext(), ng);
        proxy = diagonalize(h, opts.proxy_state + 1, even, opts.solver);
    } catch (const NumericsError&) {
        return even; // proxy failed; keep the naive allocation
    }

    HilbertConfig cfg;
    cfg.n_harmonic = decomp.n_harmonic;
    cfg.trunc.assign(static_cast<std::size_t>(n), 1);

    // Charge modes: rotate to the eigenbasis of (C^ch)^-1, read off effective
    // charging/junction energies, convert the ground-state width to a window.
    if (decomp.n_charge > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(decomp.charge_cap_inv);
        const Eigen::MatrixXd& p = es.eigenvectors();
        std::vector<int> cut(static_cast<std::size_t>(decomp.n_charge), 1);
        std::vector<bool> used(static_cast<std::size_t>(decomp.n_charge), false);
        for (int j = 0; j < decomp.n_charge; ++j) {
            const double ec_eff = es.eigenvalues()(j) *
                                  constants::electron_charge * constants::electron_charge /
                                  2.0 / constants::planck; // Hz
            double ej_quad = 0.0; // coefficient of phi_j'^2 in the cosine expansion
            for (int e = 0; e < static_cast<int>(circuit.elements().size()); ++e) {
                if (circuit.topology().branches()[static_cast<std::size_t>(e)].kind !=
                    ElementKind::junction)
                    continue;
                const double wj =
                    p.col(j).dot(decomp.w_tilde_charge[static_cast<std::size_t>(e)].cast<double>());
                ej_quad += circuit.elements()[static_cast<std::size_t>(e)].value * wj * wj;
            }
            const double ej_eff = 0.5 * ej_quad;
            const double sigma = truncation::charge_sigma(ej_eff / (8.0 * ec_eff));
            const int c = truncation::charge_truncation(sigma, opts.c_max);
            // map the rotated mode back to the dominant original charge mode
            int best = -1;
            for (int i = 0; i < decomp.n_charge; ++i) {
                if (used[static_cast<std::size_t>(i)]) continue;
                if (best < 0 || std::abs(p(i, j)) > std::abs(p(best, j))) best = i;
            }
            used[static_cast<std::size_t>(best)] = true;
            cut[static_cast<std::size_t>(best)] = c;
        }
        for (int j = 0; j < decomp.n_charge; ++j)
            cfg.trunc[static_cast<std::size_t>(decomp.n_harmonic + j)] =
                cut[static_cast<std::size_t>(j)];
    }

    double charge_prod = 1.0;
    for (int j = 0; j < decomp.n_charge; ++j)
        charge_prod *= cfg.trunc[static_cast<std::size_t>(decomp.n_harmonic + j)];
    const double k_h = static_cast<double>(k_budget) / charge_prod;

    if (decomp.n_harmonic > 0) {
        std::vector<double> alpha(static_cast<std::size_t>(decomp.n_harmonic));
        std::vector<int> peak(static_cast<std::size_t>(decomp.n_harmonic), 0);
        double alpha_sum = 0.0;
        int alpha_count = 0;
        for (int i = 0; i < decomp.n_harmonic; ++i) {
            const Eigen::VectorXd mag2 = truncation::mode_magnitudes_sq(
                proxy.vecs.col(opts.proxy_state), even, i);
            peak[static_cast<std::size_t>(i)] =
                truncation::highest_peak(mag2, opts.peak_threshold);
            alpha[static_cast<std::size_t>(i)] =
                truncation::fit_decay_rate(mag2, peak[static_cast<std::size_t>(i)]);
            if (!std::isnan(alpha[static_cast<std::size_t>(i)])) {
                alpha_sum += alpha[static_cast<std::size_t>(i)];
                ++alpha_count;
            }
        }
        const double alpha_default = alpha_count > 0 ? alpha_sum / alpha_count : 1.0;
        for (auto& a : alpha)
            if (std::isnan(a)) a = alpha_default;

        std::vector<int> h = truncation::preliminary_harmonic_cutoffs(alpha, k_h);
        for (int i = 0; i < decomp.n_harmonic; ++i)
            h[static_cast<std::size_t>(i)] += peak[static_cast<std::size_t>(i)];
        double prod = 1.0;
        for (int v : h) prod *= v;
        const double renorm = std::pow(k_h / prod, 1.0 / decomp.n_harmonic);
        for (int i = 0; i < decomp.n_harmonic; ++i)
            cfg.trunc[static_cast<std::size_t>(i)] = std::max(
                1, static_cast<int>(std::floor(h[static_cast<std::size_t>(i)] * renorm)));
    }

    // Enforce the budget invariant whatever the heuristic produced.
    while (cfg.dimension() > k_budget) {
        int arg = -1;
        for (int i = 0; i < n; ++i) {
            const int floor_i = cfg.is_charge(i) ? 3 : 2;
            if (cfg.trunc[static_cast<std::size_t>(i)] < floor_i) continue;
            if (arg < 0 ||
                cfg.trunc[static_cast<std::size_t>(i)] > cfg.trunc[static_cast<std::size_t>(arg)])
                arg = i;
        }
        if (arg < 0) throw ConfigError("cannot satisfy Hilbert budget");
        cfg.trunc[static_cast<std::size_t>(arg)] -= cfg.is_charge(arg) ? 2 : 1;
    }
    cfg.validate();
    return cfg;
}

} // namespace circuitopt
