#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "circuitopt/constants.hpp"
#include "circuitopt/error.hpp"

namespace circuitopt {

/// Noise-model constants. Dephasing amplitudes follow the usual 1/f
/// conventions; the depolarization channels use constant quality factors and
/// a fixed quasiparticle density as a stand-in model (configurable).
struct NoiseConfig {
    double a_cc = 1e-7;              // critical-current amplitude (times E_J)
    double a_ch_factor = 1e-4;       // charge amplitude in electron charges
    double a_flux = constants::two_pi * 1e-6; // flux amplitude, radians
    double omega_low = constants::two_pi * 1.0; // 1/f cutoff, rad/s
    double t_exp = 1e-5;             // measurement time, s
    double q_cap = 1e6;              // capacitive quality factor
    double q_ind = 5e8;              // inductive quality factor
    double x_qp = 3e-6;              // quasiparticle density

    double dephasing_prefactor() const {
        return std::sqrt(std::abs(2.0 * std::log(omega_low * t_exp)));
    }
    /// Charge amplitude in Cooper-pair units of n_g.
    double a_charge_ng() const { return 0.5 * a_ch_factor; }
};

struct LossConfig {
    double beta_flux = 1.0;
    double beta_charge = 1.0;
    double beta_element = 1.0;
    double beta_freq = 1.0;
    double s_flux_max = 0.1;
    double s_charge_max = 0.02;
    double s_element_max = 0.1;
    double f_q_max = 10e9; // Hz

    double delta_flux = constants::two_pi * 0.01; // flux fluctuation range, rad
    int charge_samples = 11;       // points along the gate-charge diagonal
    double fab_error = 0.01;       // relative element fabrication spread
    int element_samples = 5;       // circuits drawn for S_e
    int n_eig = 10;

    NoiseConfig noise;
};

/// All Table-style qubit metrics for one circuit at one working point.
struct MetricSet {
    double t1 = 0.0;          // s
    double t_phi = 0.0;       // s
    double t_total = 0.0;     // s
    double gate_speed = 0.0;  // Hz
    double gate_count = 0.0;
    double s_flux = 0.0;
    double s_charge = 0.0;
    double s_element = 0.0;
    double f_q = 0.0;         // Hz
    double flux_working_point = 0.0; // rad
};

inline double hinge(double x, double a) { return x > a ? x - a : 0.0; }

struct GateSpeedTerm {
    double value = 0.0;
    int level = 0;     // the i in f_i
    bool harmonic_side = false; // true for the |f_i - 2 f_1| branch
    double sign = 1.0; // sign of (f_i - 2 f_1) when harmonic_side
};

/// G = min_{i >= 2} (f_i - f_1, |f_i - 2 f_1|) on the spectrum relative to
/// the ground state. Ties resolve toward the smaller level and the direct
/// branch, which pins the subgradient used by the optimizer.
inline GateSpeedTerm gate_speed_detail(const Eigen::VectorXd& freqs) {
    if (freqs.size() < 3) throw ConfigError("gate speed needs at least 3 levels");
    GateSpeedTerm best;
    best.value = std::numeric_limits<double>::infinity();
    const double f1 = freqs(1) - freqs(0);
    for (int i = 2; i < freqs.size(); ++i) {
        const double fi = freqs(i) - freqs(0);
        if (fi - f1 < best.value) best = {fi - f1, i, false, 1.0};
        const double harm = fi - 2.0 * f1;
        if (std::abs(harm) < best.value)
            best = {std::abs(harm), i, true, harm >= 0.0 ? 1.0 : -1.0};
    }
    return best;
}

inline double gate_speed(const Eigen::VectorXd& freqs) {
    return gate_speed_detail(freqs).value;
}

inline double gate_count(double t_total, double speed) { return t_total * speed; }

/// T = 1 / (Gamma_1/2 + Gamma_phi), expressed through rates so lossless
/// channels behave as limits.
inline double decoherence_time(double gamma1, double gamma_phi) {
    const double total = 0.5 * gamma1 + gamma_phi;
    return total > 0.0 ? 1.0 / total : std::numeric_limits<double>::infinity();
}

/// S_e = population std / mean of the sampled gate counts.
inline double element_sensitivity_from_counts(const std::vector<double>& counts) {
    if (counts.empty()) throw ConfigError("no convergent element samples");
    const double n = static_cast<double>(counts.size());
    double mean = 0.0;
    for (double v : counts) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : counts) var += (v - mean) * (v - mean);
    var /= n;
    if (mean == 0.0) throw ConfigError("zero mean gate count in element sensitivity");
    return std::sqrt(var) / mean;
}

/// Total loss 1/N + hinge penalties, plus its partials with respect to each
/// metric (for diagnostics and the chain rule).
struct LossBreakdown {
    double loss = 0.0;
    double d_inv_n = 1.0;      // coefficient of 1/N (always 1)
    double d_s_flux = 0.0;     // beta_phi when the flux hinge is active
    double d_s_charge = 0.0;
    double d_s_element = 0.0;
    double d_f_q = 0.0;        // beta_f / f_q_max when the frequency hinge is active
};

inline LossBreakdown total_loss(const MetricSet& m, const LossConfig& cfg) {
    if (!(m.gate_count > 0.0) && !std::isinf(m.gate_count))
        throw ConfigError("gate count must be positive in the loss");
    LossBreakdown out;
    out.loss = 1.0 / m.gate_count;
    out.loss += cfg.beta_flux * hinge(m.s_flux, cfg.s_flux_max);
    out.loss += cfg.beta_charge * hinge(m.s_charge, cfg.s_charge_max);
    out.loss += cfg.beta_element * hinge(m.s_element, cfg.s_element_max);
    out.loss += cfg.beta_freq * hinge(m.f_q / cfg.f_q_max, 1.0);
    out.d_s_flux = m.s_flux > cfg.s_flux_max ? cfg.beta_flux : 0.0;
    out.d_s_charge = m.s_charge > cfg.s_charge_max ? cfg.beta_charge : 0.0;
    out.d_s_element = m.s_element > cfg.s_element_max ? cfg.beta_element : 0.0;
    out.d_f_q = m.f_q > cfg.f_q_max ? cfg.beta_freq / cfg.f_q_max : 0.0;
    return out;
}

} // namespace circuitopt
