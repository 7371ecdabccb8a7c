#pragma once

// Shared circuit builders for tests.

#include "circuitopt/circuit.hpp"
#include "circuitopt/code.hpp"

namespace testcircuits {

using namespace circuitopt;

inline Circuit transmon(double ej_hz = 10e9, double cap = 12e-15, double n_g = 0.0) {
    const auto t = CircuitTopology::from_branches(
        2, {{0, 1, ElementKind::junction}, {0, 1, ElementKind::capacitor}});
    Circuit c = realize_circuit(
        t, {{ElementKind::junction, ej_hz}, {ElementKind::capacitor, cap}}, 0.0,
        BoundsPolicy::ignore);
    c.set_gate_charges({n_g});
    return c;
}

inline Circuit lc_resonator(double ind = 1e-6, double cap = 1e-12) {
    const auto t = CircuitTopology::from_branches(
        2, {{0, 1, ElementKind::inductor}, {0, 1, ElementKind::capacitor}});
    return realize_circuit(
        t, {{ElementKind::inductor, ind}, {ElementKind::capacitor, cap}}, 0.0,
        BoundsPolicy::ignore);
}

inline Circuit fluxonium(double ej_hz, double ind, double cap, double flux_ext) {
    const auto t = parse_code("JL"); // J(0,1), L(1,0), plus the all-to-all capacitor
    return realize_circuit(t,
                           {{ElementKind::junction, ej_hz},
                            {ElementKind::inductor, ind},
                            {ElementKind::capacitor, cap}},
                           flux_ext, BoundsPolicy::ignore);
}

inline Circuit heavy_fluxonium(double flux_over_2pi = 0.4999) {
    return fluxonium(3.39e9, 1.23e-6, 40.4e-15,
                     flux_over_2pi * circuitopt::constants::two_pi);
}

/// Flux-tunable transmon: two junctions in a loop with a shunt capacitor.
inline Circuit jj_qubit(double ej1_hz, double ej2_hz, double cap, double flux_ext,
                        double n_g = 0.0) {
    const auto t = parse_code("JJ");
    Circuit c = realize_circuit(t,
                                {{ElementKind::junction, ej1_hz},
                                 {ElementKind::junction, ej2_hz},
                                 {ElementKind::capacitor, cap}},
                                flux_ext, BoundsPolicy::ignore);
    c.set_gate_charges({n_g});
    return c;
}

inline Circuit sycamore(double flux_over_2pi = 0.01) {
    return jj_qubit(18e9, 18e9, 108e-15,
                    flux_over_2pi * circuitopt::constants::two_pi);
}

} // namespace testcircuits
