#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "circuitopt/error.hpp"
#include "circuitopt/mode_transform.hpp"

namespace circuitopt {

/// Per-mode truncation numbers over the product Hilbert space. Harmonic modes
/// keep Fock states 0..m-1; charge modes keep number states -(m-1)/2..(m-1)/2,
/// so charge truncations must be odd.
struct HilbertConfig {
    std::vector<int> trunc; // harmonic modes first, then charge modes
    int n_harmonic = 0;

    HilbertConfig() = default;
    HilbertConfig(std::vector<int> m, int n_harm) : trunc(std::move(m)), n_harmonic(n_harm) {
        validate();
    }

    int modes() const { return static_cast<int>(trunc.size()); }

    std::int64_t dimension() const {
        std::int64_t k = 1;
        for (int m : trunc) k *= m;
        return k;
    }

    bool is_charge(int mode) const { return mode >= n_harmonic; }

    void validate() const {
        for (int i = 0; i < modes(); ++i) {
            const int m = trunc[static_cast<std::size_t>(i)];
            if (m < 1)
                throw ConfigError("truncation number must be >= 1, got " + std::to_string(m));
            if (is_charge(i) && m % 2 == 0)
                throw ConfigError("charge-mode truncation must be odd, got " + std::to_string(m));
        }
    }

    /// Config with every truncation increased by t (charge parity preserved;
    /// t must be even when charge modes are present).
    HilbertConfig enlarged(int t) const {
        if (n_harmonic < modes() && t % 2 != 0)
            throw ConfigError("truncation increment must be even for charge modes");
        HilbertConfig out(*this);
        for (auto& m : out.trunc) m += t;
        out.validate();
        return out;
    }

    std::string to_string() const {
        std::string s = "[";
        for (int i = 0; i < modes(); ++i) {
            if (i) s += ", ";
            s += std::to_string(trunc[static_cast<std::size_t>(i)]);
        }
        return s + "]";
    }
};

/// Index of each small-space product basis state inside the larger space.
/// Harmonic modes pad at the top; charge modes pad symmetrically, so the
/// local index shifts by (m_large - m_small)/2.
inline std::vector<std::int64_t> embedding_indices(const HilbertConfig& small,
                                                   const HilbertConfig& large) {
    if (small.modes() != large.modes() || small.n_harmonic != large.n_harmonic)
        throw ConfigError("mismatched mode layouts in embedding");
    const int n = small.modes();
    std::vector<int> offset(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        const int ms = small.trunc[static_cast<std::size_t>(i)];
        const int ml = large.trunc[static_cast<std::size_t>(i)];
        if (ml < ms) throw ConfigError("embedding target space is smaller");
        if (small.is_charge(i)) {
            if ((ml - ms) % 2 != 0)
                throw ConfigError("charge-mode embedding requires an even increment");
            offset[static_cast<std::size_t>(i)] = (ml - ms) / 2;
        }
    }
    std::vector<std::int64_t> map(static_cast<std::size_t>(small.dimension()));
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (std::int64_t s = 0; s < small.dimension(); ++s) {
        std::int64_t big = 0;
        for (int i = 0; i < n; ++i) {
            big = big * large.trunc[static_cast<std::size_t>(i)] +
                  (idx[static_cast<std::size_t>(i)] + offset[static_cast<std::size_t>(i)]);
        }
        map[static_cast<std::size_t>(s)] = big;
        for (int i = n - 1; i >= 0; --i) {
            if (++idx[static_cast<std::size_t>(i)] < small.trunc[static_cast<std::size_t>(i)]) break;
            idx[static_cast<std::size_t>(i)] = 0;
        }
    }
    return map;
}

} // namespace circuitopt
