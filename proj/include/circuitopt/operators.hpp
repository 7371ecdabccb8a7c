#pragma once

#include <complex>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

#include "circuitopt/circuit.hpp"
#include "circuitopt/constants.hpp"
#include "circuitopt/error.hpp"
#include "circuitopt/hilbert.hpp"
#include "circuitopt/mode_transform.hpp"

namespace circuitopt {

using Complex = std::complex<double>;
using SpMat = Eigen::SparseMatrix<Complex>;

struct SparseOperator {
    SpMat matrix;
    bool hermitian = false;

    std::int64_t dimension() const { return matrix.rows(); }

    double hermiticity_defect() const {
        SpMat d = SpMat(matrix.adjoint()) - matrix;
        double defect = 0.0, scale = 0.0;
        for (int k = 0; k < d.outerSize(); ++k)
            for (SpMat::InnerIterator it(d, k); it; ++it)
                defect = std::max(defect, std::abs(it.value()));
        for (int k = 0; k < matrix.outerSize(); ++k)
            for (SpMat::InnerIterator it(matrix, k); it; ++it)
                scale = std::max(scale, std::abs(it.value()));
        return scale > 0.0 ? defect / scale : defect;
    }
};

namespace detail {

inline SpMat sparse_identity(std::int64_t n) {
    SpMat id(n, n);
    id.setIdentity();
    return id;
}

inline SpMat prune_copy(const Eigen::MatrixXcd& dense, double tol) {
    std::vector<Eigen::Triplet<Complex>> trips;
    for (int j = 0; j < dense.cols(); ++j)
        for (int i = 0; i < dense.rows(); ++i)
            if (std::abs(dense(i, j)) > tol) trips.emplace_back(i, j, dense(i, j));
    SpMat out(dense.rows(), dense.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

/// Fock-basis annihilation operator.
inline SpMat annihilation(int m) {
    SpMat a(m, m);
    for (int n = 1; n < m; ++n) a.insert(n - 1, n) = std::sqrt(static_cast<double>(n));
    a.makeCompressed();
    return a;
}

/// exp(i z (a + a^dag)) on the truncated Fock space, via eigendecomposition
/// of the tridiagonal generator. Entries below 1e-14 are dropped; the matrix
/// elements decay fast away from the diagonal for moderate z.
inline SpMat displacement(int m, double z) {
    if (z == 0.0) return sparse_identity(m);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(m, m);
    for (int n = 1; n < m; ++n) {
        const double v = z * std::sqrt(static_cast<double>(n));
        x(n - 1, n) = v;
        x(n, n - 1) = v;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
    Eigen::VectorXcd phases(m);
    for (int i = 0; i < m; ++i)
        phases(i) = std::exp(Complex(0.0, es.eigenvalues()(i)));
    const Eigen::MatrixXcd u = es.eigenvectors() * phases.asDiagonal() *
                               es.eigenvectors().transpose();
    return prune_copy(u, 1e-14);
}

/// Charge-basis shift by `step` Cooper pairs (step may be negative).
inline SpMat charge_shift(int m, int step) {
    SpMat t(m, m);
    for (int q = 0; q < m; ++q) {
        const int r = q + step;
        if (r >= 0 && r < m) t.insert(r, q) = 1.0;
    }
    t.makeCompressed();
    return t;
}

} // namespace detail

/// Per-mode operators lifted to the truncated product space, plus the cached
/// quadratic products the Hamiltonian and its parameter derivatives are
/// assembled from. Immutable after construction.
class OperatorSet {
public:
    OperatorSet(const Circuit& circuit, const ModeDecomposition& decomp,
                const HilbertConfig& config, std::int64_t k_max = 4'000'000)
        : decomp_(decomp), config_(config) {
        config_.validate();
        if (config_.modes() != decomp.modes())
            throw ConfigError("truncation list does not match mode count");
        if (config_.n_harmonic != decomp.n_harmonic)
            throw ConfigError("harmonic mode count mismatch");
        if (config_.dimension() > k_max)
            throw NumericsError("Hilbert dimension " + std::to_string(config_.dimension()) +
                                " exceeds limit " + std::to_string(k_max));

        const int n = config_.modes();
        flux_zpf_.resize(static_cast<std::size_t>(n), 0.0);
        charge_zpf_.resize(static_cast<std::size_t>(n), 0.0);

        std::vector<SpMat> local_q(static_cast<std::size_t>(n));
        std::vector<SpMat> local_phi(static_cast<std::size_t>(n));
        std::vector<SpMat> local_num(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const int m = config_.trunc[static_cast<std::size_t>(i)];
            if (i < decomp.n_harmonic) {
                const double z = decomp.harmonic_impedance(i);
                flux_zpf_[static_cast<std::size_t>(i)] = std::sqrt(constants::hbar * z / 2.0);
                charge_zpf_[static_cast<std::size_t>(i)] = std::sqrt(constants::hbar / (2.0 * z));
                const SpMat a = detail::annihilation(m);
                local_phi[static_cast<std::size_t>(i)] =
                    flux_zpf_[static_cast<std::size_t>(i)] * (a + SpMat(a.adjoint()));
                local_q[static_cast<std::size_t>(i)] =
                    Complex(0.0, charge_zpf_[static_cast<std::size_t>(i)]) *
                    (SpMat(a.adjoint()) - a);
                SpMat num(m, m);
                for (int f = 0; f < m; ++f) num.insert(f, f) = static_cast<double>(f);
                num.makeCompressed();
                local_num[static_cast<std::size_t>(i)] = num;
            } else {
                SpMat qm(m, m);
                const int half = (m - 1) / 2;
                for (int q = 0; q < m; ++q)
                    qm.insert(q, q) = constants::cooper_pair_charge *
                                      static_cast<double>(q - half);
                qm.makeCompressed();
                local_q[static_cast<std::size_t>(i)] = qm;
            }
        }

        charge_.resize(static_cast<std::size_t>(n));
        flux_.resize(static_cast<std::size_t>(n));
        number_.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            charge_[static_cast<std::size_t>(i)] = lift(i, local_q[static_cast<std::size_t>(i)]);
            if (i < decomp.n_harmonic) {
                flux_[static_cast<std::size_t>(i)] = lift(i, local_phi[static_cast<std::size_t>(i)]);
                number_[static_cast<std::size_t>(i)] = lift(i, local_num[static_cast<std::size_t>(i)]);
            }
        }
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b)
                charge_pair_[{a, b}] =
                    a == b ? lift(a, SpMat(local_q[static_cast<std::size_t>(a)] *
                                           local_q[static_cast<std::size_t>(a)]))
                           : lift2(a, local_q[static_cast<std::size_t>(a)], b,
                                   local_q[static_cast<std::size_t>(b)]);
        for (int a = 0; a < decomp.n_harmonic; ++a)
            for (int b = a; b < decomp.n_harmonic; ++b)
                flux_pair_[{a, b}] =
                    a == b ? lift(a, SpMat(local_phi[static_cast<std::size_t>(a)] *
                                           local_phi[static_cast<std::size_t>(a)]))
                           : lift2(a, local_phi[static_cast<std::size_t>(a)], b,
                                   local_phi[static_cast<std::size_t>(b)]);

        // Junction displacement products exp(i 2pi/Phi0 w~_k . phi~), without
        // the external-flux phase so one set serves a whole flux sweep.
        for (int k : circuit.topology().branches_of(ElementKind::junction)) {
            std::vector<SpMat> factors(static_cast<std::size_t>(n));
            const auto& wt = decomp.w_tilde[static_cast<std::size_t>(k)];
            for (int i = 0; i < n; ++i) {
                const int m = config_.trunc[static_cast<std::size_t>(i)];
                if (i < decomp.n_harmonic) {
                    const double z = constants::two_pi / constants::flux_quantum *
                                     wt(i) * flux_zpf_[static_cast<std::size_t>(i)];
                    factors[static_cast<std::size_t>(i)] = detail::displacement(m, z);
                } else {
                    const int step = decomp.w_tilde_charge[static_cast<std::size_t>(k)](
                        i - decomp.n_harmonic);
                    factors[static_cast<std::size_t>(i)] = detail::charge_shift(m, step);
                }
            }
            SpMat d = factors[0];
            for (int i = 1; i < n; ++i)
                d = Eigen::kroneckerProduct(d, factors[static_cast<std::size_t>(i)]).eval();
            junction_branch_.push_back(k);
            displacement_.push_back(std::move(d));
        }
    }

    const HilbertConfig& config() const { return config_; }
    const ModeDecomposition& decomposition() const { return decomp_; }
    std::int64_t dimension() const { return config_.dimension(); }

    const SpMat& charge_op(int mode) const { return charge_.at(static_cast<std::size_t>(mode)); }
    const SpMat& flux_op(int mode) const {
        if (mode >= decomp_.n_harmonic)
            throw ConfigError("flux operator exists for harmonic modes only");
        return flux_.at(static_cast<std::size_t>(mode));
    }
    const SpMat& number_op(int mode) const { return number_.at(static_cast<std::size_t>(mode)); }
    const SpMat& charge_pair(int a, int b) const {
        return charge_pair_.at({std::min(a, b), std::max(a, b)});
    }
    const SpMat& flux_pair(int a, int b) const {
        return flux_pair_.at({std::min(a, b), std::max(a, b)});
    }

    int junction_count() const { return static_cast<int>(junction_branch_.size()); }
    int junction_branch(int j) const { return junction_branch_.at(static_cast<std::size_t>(j)); }
    int junction_entry_of_branch(int branch) const {
        for (int j = 0; j < junction_count(); ++j)
            if (junction_branch_[static_cast<std::size_t>(j)] == branch) return j;
        throw ConfigError("branch " + std::to_string(branch) + " is not a junction");
    }
    const SpMat& displacement_op(int j) const {
        return displacement_.at(static_cast<std::size_t>(j));
    }

    /// cos(2pi/Phi0 w~_k . phi~ + phase)
    SpMat junction_cos(int j, double phase) const {
        const SpMat d = std::exp(Complex(0.0, phase)) *
                        displacement_[static_cast<std::size_t>(j)];
        return SpMat(0.5 * (d + SpMat(d.adjoint())));
    }

    /// sin(2pi/Phi0 w~_k . phi~ + phase)
    SpMat junction_sin(int j, double phase) const {
        const SpMat d = std::exp(Complex(0.0, phase)) *
                        displacement_[static_cast<std::size_t>(j)];
        return SpMat(Complex(0.0, -0.5) * (d - SpMat(d.adjoint())));
    }

    /// 1/2 sum_ab M_ab (Q~_a - q_a)(Q~_b - q_b), with q the gate-charge
    /// offsets (2e n_g on charge modes, zero on harmonic modes).
    SpMat charge_quadratic(const Eigen::MatrixXd& m, const Eigen::VectorXd& offsets) const {
        const int n = config_.modes();
        SpMat out(dimension(), dimension());
        double constant = 0.0;
        Eigen::VectorXd linear = Eigen::VectorXd::Zero(n);
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (m(a, b) == 0.0) continue;
                const double w = m(a, b);
                if (b >= a) out += (b == a ? 0.5 * w : w) * charge_pair(a, b);
                linear(a) -= w * offsets(b);
                constant += 0.5 * w * offsets(a) * offsets(b);
            }
        }
        for (int a = 0; a < n; ++a)
            if (linear(a) != 0.0) out += Complex(linear(a)) * charge_op(a);
        if (constant != 0.0) out += Complex(constant) * identity();
        return out;
    }

    /// 1/2 sum_ij M_ij phi~_i phi~_j over harmonic modes.
    SpMat flux_quadratic(const Eigen::MatrixXd& m) const {
        SpMat out(dimension(), dimension());
        for (int a = 0; a < decomp_.n_harmonic; ++a)
            for (int b = 0; b < decomp_.n_harmonic; ++b) {
                if (m(a, b) == 0.0) continue;
                if (b >= a) out += (b == a ? 0.5 : 1.0) * m(a, b) * flux_pair(a, b);
            }
        return out;
    }

    /// sum_a coeff_a (Q~_a - q_a)
    SpMat charge_linear(const Eigen::VectorXd& coeff, const Eigen::VectorXd& offsets) const {
        SpMat out(dimension(), dimension());
        double constant = 0.0;
        for (int a = 0; a < config_.modes(); ++a) {
            if (coeff(a) == 0.0) continue;
            out += Complex(coeff(a)) * charge_op(a);
            constant -= coeff(a) * offsets(a);
        }
        if (constant != 0.0) out += Complex(constant) * identity();
        return out;
    }

    /// sum over harmonic modes of coeff_i phi~_i
    SpMat flux_linear(const Eigen::VectorXd& coeff) const {
        SpMat out(dimension(), dimension());
        for (int i = 0; i < decomp_.n_harmonic; ++i)
            if (coeff(i) != 0.0) out += Complex(coeff(i)) * flux_op(i);
        return out;
    }

    const SpMat& identity() const {
        if (identity_.rows() == 0) identity_ = detail::sparse_identity(dimension());
        return identity_;
    }

    /// Gate-charge offsets q_a in coulombs from per-island n_g values.
    Eigen::VectorXd charge_offsets(const Eigen::VectorXd& gate_charges) const {
        if (gate_charges.size() != decomp_.n_charge)
            throw ConfigError("expected " + std::to_string(decomp_.n_charge) +
                              " gate charges, got " + std::to_string(gate_charges.size()));
        Eigen::VectorXd q = Eigen::VectorXd::Zero(config_.modes());
        for (int j = 0; j < decomp_.n_charge; ++j)
            q(decomp_.n_harmonic + j) = constants::cooper_pair_charge * gate_charges(j);
        return q;
    }

private:
    SpMat lift(int mode, const SpMat& local) const {
        SpMat acc;
        for (int i = 0; i < config_.modes(); ++i) {
            const SpMat& f = (i == mode) ? local
                                         : detail::sparse_identity(
                                               config_.trunc[static_cast<std::size_t>(i)]);
            acc = (i == 0) ? f : SpMat(Eigen::kroneckerProduct(acc, f));
        }
        return acc;
    }

    SpMat lift2(int mode_a, const SpMat& la, int mode_b, const SpMat& lb) const {
        SpMat acc;
        for (int i = 0; i < config_.modes(); ++i) {
            const SpMat& f = (i == mode_a) ? la
                           : (i == mode_b) ? lb
                                           : detail::sparse_identity(
                                                 config_.trunc[static_cast<std::size_t>(i)]);
            acc = (i == 0) ? f : SpMat(Eigen::kroneckerProduct(acc, f));
        }
        return acc;
    }

    ModeDecomposition decomp_;
    HilbertConfig config_;
    std::vector<double> flux_zpf_;   // sqrt(hbar Z / 2) per harmonic mode
    std::vector<double> charge_zpf_; // sqrt(hbar / 2Z) per harmonic mode
    std::vector<SpMat> charge_;
    std::vector<SpMat> flux_;
    std::vector<SpMat> number_;
    std::map<std::pair<int, int>, SpMat> charge_pair_;
    std::map<std::pair<int, int>, SpMat> flux_pair_;
    std::vector<int> junction_branch_;
    std::vector<SpMat> displacement_;
    mutable SpMat identity_;
};

inline OperatorSet build_mode_operators(const Circuit& circuit,
                                        const ModeDecomposition& decomp,
                                        const HilbertConfig& config,
                                        std::int64_t k_max = 4'000'000) {
    return OperatorSet(circuit, decomp, config, k_max);
}

/// The external-flux phase entering junction k's cosine (b_k^T phi_ext).
inline double junction_flux_phase(const Circuit& circuit, int branch, double flux_ext) {
    return circuit.topology().flux_branch() == branch ? flux_ext : 0.0;
}

/// Assemble the transformed Hamiltonian in hertz over the truncated space:
/// harmonic mode energies, charge-island charging with gate-charge offsets,
/// junction cosines, and (for a junction-free loop) the linear flux term.
inline SparseOperator assemble_hamiltonian(const Circuit& circuit,
                                           const ModeDecomposition& decomp,
                                           const OperatorSet& ops, double flux_ext,
                                           const Eigen::VectorXd& gate_charges) {
    const double h = constants::planck;
    SpMat ham(ops.dimension(), ops.dimension());

    for (int i = 0; i < decomp.n_harmonic; ++i) {
        ham += Complex(decomp.harmonic_freq(i)) *
               SpMat(ops.number_op(i) + SpMat(0.5 * ops.identity()));
    }

    if (decomp.n_charge > 0) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(decomp.modes(), decomp.modes());
        m.bottomRightCorner(decomp.n_charge, decomp.n_charge) = decomp.charge_cap_inv / h;
        ham += ops.charge_quadratic(m, ops.charge_offsets(gate_charges));
    }

    for (int j = 0; j < ops.junction_count(); ++j) {
        const int k = ops.junction_branch(j);
        const double ej = circuit.elements()[static_cast<std::size_t>(k)].value; // Hz
        ham -= Complex(ej) * ops.junction_cos(j, junction_flux_phase(circuit, k, flux_ext));
    }

    const int fb = circuit.topology().flux_branch();
    if (fb >= 0 &&
        circuit.topology().branches()[static_cast<std::size_t>(fb)].kind ==
            ElementKind::inductor) {
        const double l = circuit.elements()[static_cast<std::size_t>(fb)].value;
        const double coeff =
            constants::flux_quantum / constants::two_pi * flux_ext / l / h;
        Eigen::VectorXd c = coeff * decomp.w_tilde[static_cast<std::size_t>(fb)]
                                        .head(decomp.n_harmonic);
        ham += ops.flux_linear(c);
    }

    ham.prune([](int, int, const Complex& v) { return v != Complex(0.0); });
    ham.makeCompressed();
    return SparseOperator{std::move(ham), true};
}

/// Node charge operator Q_i (original basis, via Q = R Q~) or the mode
/// operator Q~_i (transformed basis).
inline SparseOperator node_charge_operator(const ModeDecomposition& decomp,
                                           const OperatorSet& ops, int index,
                                           const std::string& basis = "original") {
    if (basis == "transformed") {
        if (index < 0 || index >= decomp.modes())
            throw ConfigError("mode index out of range");
        return SparseOperator{ops.charge_op(index), true};
    }
    if (basis != "original") throw ConfigError("basis must be original or transformed");
    if (index < 1 || index > decomp.modes())
        throw ConfigError("node index out of range");
    SpMat out(ops.dimension(), ops.dimension());
    for (int a = 0; a < decomp.modes(); ++a) {
        const double r = decomp.R(index - 1, a);
        if (r != 0.0) out += Complex(r) * ops.charge_op(a);
    }
    return SparseOperator{std::move(out), true};
}

} // namespace circuitopt
