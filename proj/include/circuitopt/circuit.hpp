#pragma once

#include <iostream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "circuitopt/code.hpp"
#include "circuitopt/constants.hpp"
#include "circuitopt/element.hpp"
#include "circuitopt/error.hpp"
#include "circuitopt/rng.hpp"

namespace circuitopt {

enum class BoundsPolicy { ignore, warn, enforce };

/// A realized circuit: topology plus element values, external flux and gate
/// charges, with the classical capacitance/susceptance matrices assembled.
/// Immutable after construction except for gate charges, whose count is only
/// known once the mode decomposition identifies the charge islands.
class Circuit {
public:
    Circuit(CircuitTopology topo, std::vector<Element> elements, double flux_ext,
            BoundsPolicy policy = BoundsPolicy::warn,
            const ElementBounds& bounds = ElementBounds{})
        : topo_(std::move(topo)), elements_(std::move(elements)), flux_ext_(flux_ext) {
        const auto& branches = topo_.branches();
        if (elements_.size() != branches.size())
            throw ConfigError("expected " + std::to_string(branches.size()) +
                              " element values, got " + std::to_string(elements_.size()));
        for (std::size_t k = 0; k < elements_.size(); ++k) {
            if (elements_[k].kind != branches[k].kind)
                throw ConfigError("element kind mismatch at branch " + std::to_string(k));
            if (!(elements_[k].value > 0.0))
                throw ConfigError("non-positive element value at branch " + std::to_string(k));
            check_bounds(k, policy, bounds);
        }
        build_matrices();
    }

    const CircuitTopology& topology() const { return topo_; }
    const std::vector<Element>& elements() const { return elements_; }
    double flux_ext() const { return flux_ext_; }

    int dof() const { return topo_.dof(); }

    /// n_N x n_N capacitance matrix (farads).
    const Eigen::MatrixXd& cap_matrix() const { return cap_; }
    /// n_N x n_N susceptance matrix L* (1/henry).
    const Eigen::MatrixXd& susceptance_matrix() const { return sus_; }

    const std::vector<double>& gate_charges() const { return gate_charges_; }
    void set_gate_charges(std::vector<double> ng) { gate_charges_ = std::move(ng); }

    Circuit with_flux(double flux) const {
        Circuit c(*this);
        c.flux_ext_ = flux;
        return c;
    }

    Circuit with_elements(std::vector<Element> elements,
                          BoundsPolicy policy = BoundsPolicy::ignore) const {
        Circuit c(topo_, std::move(elements), flux_ext_, policy);
        c.gate_charges_ = gate_charges_;
        return c;
    }

private:
    void check_bounds(std::size_t k, BoundsPolicy policy, const ElementBounds& bounds) {
        if (policy == BoundsPolicy::ignore) return;
        const auto [lo, hi] = bounds.range(elements_[k].kind);
        const double v = elements_[k].value;
        if (v >= lo && v <= hi) return;
        const std::string msg = "element value " + std::to_string(v) + " at branch " +
                                std::to_string(k) + " outside [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]";
        if (policy == BoundsPolicy::enforce) throw ConfigError(msg);
        std::cerr << "warning: " << msg << "\n";
    }

    void build_matrices() {
        const int n = dof();
        cap_ = Eigen::MatrixXd::Zero(n, n);
        sus_ = Eigen::MatrixXd::Zero(n, n);
        const auto& branches = topo_.branches();
        for (std::size_t k = 0; k < branches.size(); ++k) {
            const auto& b = branches[k];
            double y = 0.0;
            Eigen::MatrixXd* target = nullptr;
            if (b.kind == ElementKind::capacitor) {
                y = elements_[k].value;
                target = &cap_;
            } else if (b.kind == ElementKind::inductor) {
                y = 1.0 / elements_[k].value;
                target = &sus_;
            } else {
                continue; // junctions enter through the cosine terms only
            }
            const int a = b.node_a - 1;
            const int c = b.node_b - 1;
            if (a >= 0) (*target)(a, a) += y;
            if (c >= 0) (*target)(c, c) += y;
            if (a >= 0 && c >= 0) {
                (*target)(a, c) -= y;
                (*target)(c, a) -= y;
            }
        }
    }

    CircuitTopology topo_;
    std::vector<Element> elements_;
    double flux_ext_ = 0.0;
    std::vector<double> gate_charges_;
    Eigen::MatrixXd cap_;
    Eigen::MatrixXd sus_;
};

/// Build a circuit from per-branch values. `flux_ext` is in radians.
inline Circuit realize_circuit(const CircuitTopology& topo, std::vector<Element> elements,
                               double flux_ext = 0.0,
                               BoundsPolicy policy = BoundsPolicy::warn,
                               const ElementBounds& bounds = ElementBounds{}) {
    return Circuit(topo, std::move(elements), flux_ext, policy, bounds);
}

/// Draw one value per branch, log-uniform within the per-kind bounds.
inline std::vector<Element> sample_elements(const CircuitTopology& topo,
                                            const ElementBounds& bounds, Rng& rng) {
    std::vector<Element> out;
    out.reserve(topo.branches().size());
    for (const auto& b : topo.branches()) {
        const auto [lo, hi] = bounds.range(b.kind);
        out.emplace_back(b.kind, rng.log_uniform(lo, hi));
    }
    return out;
}

inline std::vector<Element> sample_elements(const CircuitTopology& topo,
                                            const ElementBounds& bounds,
                                            std::uint64_t seed) {
    Rng rng(seed);
    return sample_elements(topo, bounds, rng);
}

} // namespace circuitopt
