#pragma once

#include <memory>
#include <utility>

#include "circuitopt/gradients.hpp"
#include "circuitopt/spectrum.hpp"

namespace circuitopt {

/// One circuit prepared at one working point: decomposition, lifted
/// operators, diagonalized spectrum and the parameter context. Pinned in
/// memory (non-copyable) because the context holds pointers.
class CircuitWorkspace {
public:
    CircuitWorkspace(Circuit circuit, HilbertConfig config, int n_eig,
                     SolverOptions solver = {}, std::int64_t k_max = 4'000'000)
        : circuit_(std::move(circuit)),
          decomp_(compute_transformation(circuit_)),
          ops_(circuit_, decomp_, config, k_max) {
        ctx_ = make_context(circuit_, decomp_, ops_);
        spec_ = diagonalize(circuitopt::assemble_hamiltonian(ctx_),
                            n_eig, config, solver);
    }

    CircuitWorkspace(const CircuitWorkspace&) = delete;
    CircuitWorkspace& operator=(const CircuitWorkspace&) = delete;

    const Circuit& circuit() const { return circuit_; }
    const ModeDecomposition& decomp() const { return decomp_; }
    const OperatorSet& ops() const { return ops_; }
    const Spectrum& spectrum() const { return spec_; }
    const HamiltonianContext& ctx() const { return ctx_; }

    /// Re-diagonalize at a different flux / gate-charge point reusing the
    /// lifted operators (they do not depend on either control).
    std::pair<HamiltonianContext, Spectrum> at_point(double flux_ext,
                                                     const Eigen::VectorXd& gate_charges,
                                                     const SolverOptions& solver = {}) const {
        HamiltonianContext ctx = ctx_;
        ctx.flux_ext = flux_ext;
        ctx.gate_charges = gate_charges;
        Spectrum s = diagonalize(circuitopt::assemble_hamiltonian(ctx),
                                 spec_.n_eig(), spec_.config, solver);
        return {ctx, std::move(s)};
    }

private:
    Circuit circuit_;
    ModeDecomposition decomp_;
    OperatorSet ops_;
    HamiltonianContext ctx_;
    Spectrum spec_;
};

} // namespace circuitopt
