#pragma once

#include <optional>
#include <string>

#include "circuitopt/error.hpp"

namespace circuitopt {

enum class ElementKind { capacitor, inductor, junction };

inline char element_symbol(ElementKind k) {
    switch (k) {
        case ElementKind::capacitor: return 'C';
        case ElementKind::inductor: return 'L';
        case ElementKind::junction: return 'J';
    }
    return '?';
}

inline ElementKind element_from_symbol(char c) {
    switch (c) {
        case 'C': return ElementKind::capacitor;
        case 'L': return ElementKind::inductor;
        case 'J': return ElementKind::junction;
    }
    throw ParseError(std::string("unknown element symbol '") + c + "'");
}

/// A lumped element value. Capacitors are in farads, inductors in henries,
/// junctions in hertz of E_J/h.
struct Element {
    ElementKind kind = ElementKind::capacitor;
    double value = 0.0;
    bool trainable = true;
    std::optional<double> quality_factor; // per-element loss override

    Element() = default;
    Element(ElementKind k, double v, bool train = true,
            std::optional<double> q = std::nullopt)
        : kind(k), value(v), trainable(train), quality_factor(q) {
        if (!(value > 0.0))
            throw ConfigError("element value must be positive, got " +
                              std::to_string(v));
    }
};

/// Fabrication search ranges per element kind.
struct ElementBounds {
    double cap_min = 1e-15;   // 1 fF
    double cap_max = 12e-12;  // 12 pF
    double ind_min = 1e-15;   // 1 fH
    double ind_max = 5e-6;    // 5 uH
    double junction_min = 1e9;   // 1 GHz
    double junction_max = 100e9; // 100 GHz

    std::pair<double, double> range(ElementKind k) const {
        switch (k) {
            case ElementKind::capacitor: return {cap_min, cap_max};
            case ElementKind::inductor: return {ind_min, ind_max};
            case ElementKind::junction: return {junction_min, junction_max};
        }
        return {0.0, 0.0};
    }
};

} // namespace circuitopt
