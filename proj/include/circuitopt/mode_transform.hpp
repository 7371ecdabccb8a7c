#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "circuitopt/circuit.hpp"
#include "circuitopt/constants.hpp"
#include "circuitopt/error.hpp"

namespace circuitopt {

enum class ModeKind { harmonic, charge };

/// Canonical transformation splitting the quadratic Hamiltonian into
/// decoupled harmonic modes and charge (island) modes.
///
/// S and R satisfy S^T = R^{-1}; transformed flux/charge operators are
/// phi~ = S^{-1} phi, Q~ = R^{-1} Q. Harmonic columns diagonalize
/// C^{-1/2} L* C^{-1/2} and are scaled to unit norm; charge columns are the
/// integer indicator vectors of inductively connected islands, which keeps the
/// junction couplings w~ integral on charge modes.
struct ModeDecomposition {
    Eigen::MatrixXd S, R;
    int n_harmonic = 0;
    int n_charge = 0;

    Eigen::VectorXd harmonic_freq;      // Hz, ascending
    Eigen::VectorXd harmonic_impedance; // ohms: sqrt(L~_i / C~_i)
    Eigen::VectorXd harmonic_cap;       // C~ diagonal over harmonic block
    Eigen::VectorXd harmonic_sus;       // L*~ diagonal over harmonic block

    Eigen::MatrixXd charge_cap;     // C^ch
    Eigen::MatrixXd charge_cap_inv; // (C^ch)^{-1}
    Eigen::MatrixXd cap_inv;        // original C^{-1}
    Eigen::MatrixXd ctilde_inv;     // R^T C^{-1} R

    // Per-branch transformed couplings w~_k = S^T w_k.
    std::vector<Eigen::VectorXd> w_tilde;
    // Charge-mode components of w~_k rounded to integers.
    std::vector<Eigen::VectorXi> w_tilde_charge;

    // Node sets of the charge islands, one per charge mode.
    std::vector<std::vector<int>> islands;

    int modes() const { return n_harmonic + n_charge; }
    ModeKind kind(int mode) const {
        return mode < n_harmonic ? ModeKind::harmonic : ModeKind::charge;
    }
};

namespace detail {

/// Connected components of the inductor subgraph; components not containing
/// ground are the charge islands (the null space of L*).
inline std::vector<std::vector<int>> charge_islands(const CircuitTopology& topo) {
    const int n = topo.node_count();
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const auto& b : topo.branches()) {
        if (b.kind != ElementKind::inductor) continue;
        adj[static_cast<std::size_t>(b.node_a)].push_back(b.node_b);
        adj[static_cast<std::size_t>(b.node_b)].push_back(b.node_a);
    }
    int ncomp = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        std::vector<int> stack = {s};
        comp[static_cast<std::size_t>(s)] = ncomp;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v : adj[static_cast<std::size_t>(u)])
                if (comp[static_cast<std::size_t>(v)] < 0) {
                    comp[static_cast<std::size_t>(v)] = ncomp;
                    stack.push_back(v);
                }
        }
        ++ncomp;
    }
    const int ground_comp = comp[0];
    std::vector<std::vector<int>> islands;
    for (int c = 0; c < ncomp; ++c) {
        if (c == ground_comp) continue;
        std::vector<int> nodes;
        for (int v = 1; v < n; ++v)
            if (comp[static_cast<std::size_t>(v)] == c) nodes.push_back(v);
        if (!nodes.empty()) islands.push_back(std::move(nodes));
    }
    std::sort(islands.begin(), islands.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return islands;
}

} // namespace detail

inline ModeDecomposition compute_transformation(const Circuit& circuit) {
    const int n = circuit.dof();
    const Eigen::MatrixXd& C = circuit.cap_matrix();
    const Eigen::MatrixXd& Ls = circuit.susceptance_matrix();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> cap_es(C);
    if (cap_es.info() != Eigen::Success)
        throw NumericsError("capacitance matrix eigendecomposition failed");
    const Eigen::VectorXd cev = cap_es.eigenvalues();
    if (cev(0) <= 0.0 || cev(0) < 1e-14 * cev(n - 1))
        throw NumericsError("capacitance matrix is numerically singular");
    const Eigen::MatrixXd c_inv_sqrt =
        cap_es.eigenvectors() * cev.cwiseSqrt().cwiseInverse().asDiagonal() *
        cap_es.eigenvectors().transpose();

    const Eigen::MatrixXd c_sqrt = cap_es.eigenvectors() *
                                   cev.cwiseSqrt().asDiagonal() *
                                   cap_es.eigenvectors().transpose();
    const Eigen::MatrixXd B = c_inv_sqrt * Ls * c_inv_sqrt;

    ModeDecomposition d;
    d.islands = detail::charge_islands(circuit.topology());
    d.n_charge = static_cast<int>(d.islands.size());
    d.n_harmonic = n - d.n_charge;

    // The island indicators span the null space of L* structurally. Deflating
    // them exactly (in the C metric) keeps the harmonic/charge blocks
    // decoupled even when susceptances span many orders of magnitude.
    Eigen::MatrixXd v_h;
    if (d.n_charge > 0) {
        Eigen::MatrixXd u_ch = Eigen::MatrixXd::Zero(n, d.n_charge);
        for (int j = 0; j < d.n_charge; ++j)
            for (int node : d.islands[static_cast<std::size_t>(j)])
                u_ch(node - 1, j) = 1.0;
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(c_sqrt * u_ch);
        const Eigen::MatrixXd q = qr.householderQ();
        v_h = q.rightCols(d.n_harmonic);
    } else {
        v_h = Eigen::MatrixXd::Identity(n, n);
    }

    struct HarmonicCol {
        double freq, impedance;
        Eigen::VectorXd col;
    };
    std::vector<HarmonicCol> harm;
    if (d.n_harmonic > 0) {
        const Eigen::MatrixXd bh = v_h.transpose() * B * v_h;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bes(
            0.5 * (bh + bh.transpose()));
        const Eigen::VectorXd lam = bes.eigenvalues();
        if (lam(0) <= 1e-13 * std::max(lam(d.n_harmonic - 1), 1e-300))
            throw NumericsError("failed to reach block form: non-positive harmonic mode");
        for (int i = 0; i < d.n_harmonic; ++i) {
            Eigen::VectorXd a = c_inv_sqrt * (v_h * bes.eigenvectors().col(i));
            const double norm = a.norm();
            const double omega = std::sqrt(lam(i));
            harm.push_back({omega / constants::two_pi, norm * norm / omega, a / norm});
        }
    }

    std::sort(harm.begin(), harm.end(), [](const auto& a, const auto& b) {
        if (a.freq != b.freq) return a.freq < b.freq;
        return a.impedance > b.impedance;
    });

    d.S = Eigen::MatrixXd::Zero(n, n);
    d.harmonic_freq.resize(d.n_harmonic);
    d.harmonic_impedance.resize(d.n_harmonic);
    for (int i = 0; i < d.n_harmonic; ++i) {
        d.S.col(i) = harm[static_cast<std::size_t>(i)].col;
        d.harmonic_freq(i) = harm[static_cast<std::size_t>(i)].freq;
        d.harmonic_impedance(i) = harm[static_cast<std::size_t>(i)].impedance;
    }
    for (int j = 0; j < d.n_charge; ++j) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
        for (int node : d.islands[static_cast<std::size_t>(j)]) u(node - 1) = 1.0;
        d.S.col(d.n_harmonic + j) = u;
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(d.S.transpose());
    if (!lu.isInvertible())
        throw NumericsError("canonical transformation is singular");
    d.R = lu.inverse();

    d.cap_inv = cap_es.eigenvectors() * cev.cwiseInverse().asDiagonal() *
                cap_es.eigenvectors().transpose();
    d.ctilde_inv = d.R.transpose() * d.cap_inv * d.R;

    const Eigen::MatrixXd ctilde = d.S.transpose() * C * d.S;
    const Eigen::MatrixXd lstilde = d.S.transpose() * Ls * d.S;

    // Block-structure check: harmonic block diagonal, harmonic/charge blocks
    // decoupled, charge rows of L*~ zero.
    const double cscale = ctilde.cwiseAbs().maxCoeff();
    const double lscale = std::max(lstilde.cwiseAbs().maxCoeff(), 1e-300);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const bool harmonic_pair = i < d.n_harmonic && j < d.n_harmonic;
            if (harmonic_pair && i != j) {
                if (std::abs(ctilde(i, j)) > 1e-9 * cscale ||
                    std::abs(lstilde(i, j)) > 1e-9 * lscale)
                    throw NumericsError("failed to reach block-diagonal form");
            }
            const bool cross = (i < d.n_harmonic) != (j < d.n_harmonic);
            if (cross && std::abs(ctilde(i, j)) > 1e-9 * cscale)
                throw NumericsError("harmonic/charge capacitive block coupling remained");
            if ((i >= d.n_harmonic || j >= d.n_harmonic) &&
                std::abs(lstilde(i, j)) > 1e-9 * lscale)
                throw NumericsError("charge rows of transformed susceptance are not null");
        }
    }

    d.harmonic_cap.resize(d.n_harmonic);
    d.harmonic_sus.resize(d.n_harmonic);
    for (int i = 0; i < d.n_harmonic; ++i) {
        d.harmonic_cap(i) = ctilde(i, i);
        d.harmonic_sus(i) = lstilde(i, i);
    }
    d.charge_cap = ctilde.bottomRightCorner(d.n_charge, d.n_charge);
    if (d.n_charge > 0) {
        Eigen::FullPivLU<Eigen::MatrixXd> clu(d.charge_cap);
        if (!clu.isInvertible())
            throw NumericsError("charge-island charging matrix is singular");
        d.charge_cap_inv = clu.inverse();
    } else {
        d.charge_cap_inv.resize(0, 0);
    }

    const auto& branches = circuit.topology().branches();
    d.w_tilde.reserve(branches.size());
    d.w_tilde_charge.reserve(branches.size());
    for (std::size_t k = 0; k < branches.size(); ++k) {
        const Eigen::VectorXd w =
            circuit.topology().incidence(static_cast<int>(k)).cast<double>();
        Eigen::VectorXd wt = d.S.transpose() * w;
        Eigen::VectorXi wc(d.n_charge);
        for (int j = 0; j < d.n_charge; ++j) {
            const double v = wt(d.n_harmonic + j);
            const double r = std::round(v);
            if (std::abs(v - r) > 1e-9)
                throw NumericsError("non-integer charge-mode coupling " + std::to_string(v));
            wc(j) = static_cast<int>(r);
            wt(d.n_harmonic + j) = r;
        }
        d.w_tilde.push_back(std::move(wt));
        d.w_tilde_charge.push_back(std::move(wc));
    }

    return d;
}

struct ModeClassification {
    int n_harmonic = 0;
    int n_charge = 0;
    std::vector<ModeKind> labels; // harmonic modes first
};

inline ModeClassification classify_modes(const ModeDecomposition& d) {
    ModeClassification c;
    c.n_harmonic = d.n_harmonic;
    c.n_charge = d.n_charge;
    for (int i = 0; i < d.modes(); ++i) c.labels.push_back(d.kind(i));
    return c;
}

} // namespace circuitopt
