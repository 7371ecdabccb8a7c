#pragma once

namespace circuitopt::constants {

// 2019 SI exact values.
inline constexpr double planck = 6.62607015e-34;          // J s
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double electron_charge = 1.602176634e-19; // C
inline constexpr double boltzmann = 1.380649e-23;         // J/K

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

// Superconducting flux quantum h/2e and its reduced form.
inline constexpr double flux_quantum = planck / (2.0 * electron_charge); // Wb
inline constexpr double reduced_flux_quantum = hbar / (2.0 * electron_charge);

// Cooper-pair charge.
inline constexpr double cooper_pair_charge = 2.0 * electron_charge;

} // namespace circuitopt::constants
