#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "circuitopt/eigensolver.hpp"
#include "circuitopt/hilbert.hpp"
#include "circuitopt/operators.hpp"

namespace circuitopt {

/// Lowest eigenfrequencies and eigenvectors of a circuit Hamiltonian,
/// together with the truncation configuration that produced them.
struct Spectrum {
    Eigen::VectorXd freqs;  // Hz, ascending
    Eigen::MatrixXcd vecs;  // K x n_eig, unit columns
    HilbertConfig config;

    int n_eig() const { return static_cast<int>(freqs.size()); }
    double qubit_freq() const { return freqs(1) - freqs(0); }
};

inline Spectrum diagonalize(const SparseOperator& h, int n_eig,
                            const HilbertConfig& config,
                            const SolverOptions& opts = {}) {
    auto [vals, vecs] = lowest_eigenpairs(h.matrix, n_eig, opts);
    return Spectrum{std::move(vals), std::move(vecs), config};
}

/// Convergence error 1 - |<f~|f'>|^2 between a state of `small` and the same
/// state recomputed in the enlarged space `large`.
inline double convergence_error(const Spectrum& small, const Spectrum& large,
                                int state) {
    if (state >= small.n_eig() || state >= large.n_eig())
        throw ConfigError("state index beyond computed eigenpairs");
    const auto map = embedding_indices(small.config, large.config);
    Complex overlap(0.0, 0.0);
    const auto& sv = small.vecs;
    const auto& lv = large.vecs;
    for (std::int64_t i = 0; i < small.config.dimension(); ++i)
        overlap += std::conj(lv(map[static_cast<std::size_t>(i)], state)) * sv(i, state);
    const double eps = 1.0 - std::norm(overlap);
    return std::min(std::max(eps, 0.0), 1.0);
}

struct ConvergenceOptions {
    int t = 2;
    double threshold = 1e-5;
    int state = 2; // second excited state
    std::int64_t k_max = 4'000'000;
    SolverOptions solver;
};

/// Appendix-style convergence probe: rediagonalize with every truncation
/// number increased by t and measure the eigenvector overlap loss.
inline double convergence_probe(const Circuit& circuit, const ModeDecomposition& decomp,
                                const Spectrum& spec, const ConvergenceOptions& opts = {}) {
    const HilbertConfig big_cfg = spec.config.enlarged(opts.t);
    if (big_cfg.dimension() > opts.k_max)
        throw NumericsError("enlarged space dimension " + std::to_string(big_cfg.dimension()) +
                            " exceeds limit");
    OperatorSet big_ops(circuit, decomp, big_cfg, opts.k_max);
    Eigen::VectorXd ng = Eigen::VectorXd::Zero(decomp.n_charge);
    for (int j = 0; j < decomp.n_charge &&
                    j < static_cast<int>(circuit.gate_charges().size()); ++j)
        ng(j) = circuit.gate_charges()[static_cast<std::size_t>(j)];
    const SparseOperator big_h =
        assemble_hamiltonian(circuit, decomp, big_ops, circuit.flux_ext(), ng);
    const Spectrum big = diagonalize(big_h, opts.state + 1, big_cfg, opts.solver);
    return convergence_error(spec, big, opts.state);
}

inline bool check_convergence(const Circuit& circuit, const ModeDecomposition& decomp,
                              const Spectrum& spec, const ConvergenceOptions& opts = {}) {
    return convergence_probe(circuit, decomp, spec, opts) < opts.threshold;
}

enum class SweepParameter { flux, charge_diagonal };

struct SweepResult {
    SweepParameter parameter = SweepParameter::flux;
    Eigen::VectorXd grid;   // flux in radians, or the common n_g value
    Eigen::MatrixXd freqs;  // one row per grid point, Hz
    std::vector<bool> ok;   // false where diagonalization failed
};

/// Eigenfrequencies along a flux or gate-charge-diagonal grid. The operator
/// set is built once; junction phases / charge offsets vary per point.
inline SweepResult sweep(const Circuit& circuit, const ModeDecomposition& decomp,
                         const OperatorSet& ops, SweepParameter param,
                         const Eigen::VectorXd& grid, int n_eig,
                         const SolverOptions& solver = {}) {
    SweepResult out;
    out.parameter = param;
    out.grid = grid;
    out.freqs = Eigen::MatrixXd::Zero(grid.size(), n_eig);
    out.ok.assign(static_cast<std::size_t>(grid.size()), true);

    Eigen::VectorXd ng = Eigen::VectorXd::Zero(decomp.n_charge);
    for (int j = 0; j < decomp.n_charge &&
                    j < static_cast<int>(circuit.gate_charges().size()); ++j)
        ng(j) = circuit.gate_charges()[static_cast<std::size_t>(j)];

    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        double flux = circuit.flux_ext();
        Eigen::VectorXd point_ng = ng;
        if (param == SweepParameter::flux)
            flux = grid(i);
        else
            point_ng.setConstant(grid(i));
        try {
            const SparseOperator h =
                assemble_hamiltonian(circuit, decomp, ops, flux, point_ng);
            const Spectrum s = diagonalize(h, n_eig, ops.config(), solver);
            out.freqs.row(i) = s.freqs.transpose();
        } catch (const NumericsError&) {
            out.ok[static_cast<std::size_t>(i)] = false;
        }
    }
    return out;
}

} // namespace circuitopt
