#pragma once

// Brute-force reference models built directly from textbook formulas. These
// share no code with the library's operator/transformation machinery; tests
// compare the two paths.

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "circuitopt/constants.hpp"

namespace oracles {

using Complex = std::complex<double>;

/// Charge-basis qubit: H = 4 E_C (n - n_g)^2 - sum_k E_Jk cos(phi + phase_k),
/// all energies in hertz. Returns ascending eigenvalues.
inline Eigen::VectorXd charge_qubit_levels(double ec_hz,
                                           const std::vector<std::pair<double, double>>& junctions,
                                           double n_g, int m) {
    const int half = (m - 1) / 2;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m, m);
    for (int q = 0; q < m; ++q) {
        const double n = q - half;
        h(q, q) = 4.0 * ec_hz * (n - n_g) * (n - n_g);
    }
    for (const auto& [ej, phase] : junctions) {
        for (int q = 0; q + 1 < m; ++q) {
            h(q + 1, q) += -0.5 * ej * std::exp(Complex(0.0, phase));
            h(q, q + 1) += -0.5 * ej * std::exp(Complex(0.0, -phase));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    return es.eigenvalues();
}

/// Fluxonium in the Fock basis of its linear part:
/// H = 4 E_C n^2 + 1/2 E_L phi^2 - E_J cos(phi + phi_ext), energies in hertz.
inline Eigen::VectorXd fluxonium_levels(double ec_hz, double el_hz, double ej_hz,
                                        double phi_ext, int m) {
    const double omega = std::sqrt(8.0 * ec_hz * el_hz);
    const double phi_zpf = std::sqrt(omega / (2.0 * el_hz));
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(m, m);
    for (int n = 1; n < m; ++n) {
        const double v = phi_zpf * std::sqrt(static_cast<double>(n));
        phi(n - 1, n) = v;
        phi(n, n - 1) = v;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pes(phi);
    Eigen::VectorXd cosv(m);
    for (int i = 0; i < m; ++i) cosv(i) = std::cos(pes.eigenvalues()(i) + phi_ext);
    const Eigen::MatrixXd cos_op =
        pes.eigenvectors() * cosv.asDiagonal() * pes.eigenvectors().transpose();

    Eigen::MatrixXd h = -ej_hz * cos_op;
    for (int n = 0; n < m; ++n) h(n, n) += omega * (n + 0.5);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    return es.eigenvalues();
}

inline double capacitance_ec_hz(double cap_farad) {
    using namespace circuitopt::constants;
    return electron_charge * electron_charge / (2.0 * cap_farad) / planck;
}

inline double inductance_el_hz(double ind_henry) {
    using namespace circuitopt::constants;
    const double r = flux_quantum / two_pi;
    return r * r / ind_henry / planck;
}

/// Kolmogorov-Smirnov p-value against the uniform distribution on [0, 1].
inline double ks_uniform_pvalue(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double cdf = samples[i];
        d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - cdf));
        d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    }
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k)
        p += 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    return std::min(std::max(p, 0.0), 1.0);
}

/// Central finite difference of a scalar function.
template <typename F>
double fd_central(F&& f, double x, double step) {
    return (f(x + step) - f(x - step)) / (2.0 * step);
}

/// Second central finite difference.
template <typename F>
double fd_second(F&& f, double x, double step) {
    return (f(x + step) - 2.0 * f(x) + f(x - step)) / (step * step);
}

inline double rel_err(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

} // namespace oracles
