#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "circuitopt/operators.hpp"
#include "circuitopt/spectrum.hpp"

namespace circuitopt {

/// A differentiable circuit parameter: an element value at a branch, a gate
/// charge at a charge island, or the external loop flux.
struct ParameterRef {
    enum class Kind { capacitor, inductor, junction, gate_charge, flux };

    Kind kind = Kind::capacitor;
    int index = 0; // branch index; island index for gate_charge; 0 for flux

    auto operator<=>(const ParameterRef&) const = default;

    std::string name() const {
        switch (kind) {
            case Kind::capacitor: return "c[" + std::to_string(index) + "]";
            case Kind::inductor: return "l[" + std::to_string(index) + "]";
            case Kind::junction: return "EJ[" + std::to_string(index) + "]";
            case Kind::gate_charge: return "ng[" + std::to_string(index) + "]";
            case Kind::flux: return "flux";
        }
        return "?";
    }
};

/// Everything fixed at one working point of one circuit: decomposition,
/// lifted operators, flux and gate-charge values.
struct HamiltonianContext {
    const Circuit* circuit = nullptr;
    const ModeDecomposition* decomp = nullptr;
    const OperatorSet* ops = nullptr;
    double flux_ext = 0.0;
    Eigen::VectorXd gate_charges;

    double element_value(int branch) const {
        return circuit->elements()[static_cast<std::size_t>(branch)].value;
    }

    double junction_phase(int branch) const {
        return junction_flux_phase(*circuit, branch, flux_ext);
    }

    /// All parameters this circuit exposes: one per branch element, one per
    /// charge island, plus the loop flux when a loop exists.
    std::vector<ParameterRef> all_parameters() const {
        std::vector<ParameterRef> out;
        const auto& branches = circuit->topology().branches();
        for (int k = 0; k < static_cast<int>(branches.size()); ++k) {
            switch (branches[static_cast<std::size_t>(k)].kind) {
                case ElementKind::capacitor:
                    out.push_back({ParameterRef::Kind::capacitor, k});
                    break;
                case ElementKind::inductor:
                    out.push_back({ParameterRef::Kind::inductor, k});
                    break;
                case ElementKind::junction:
                    out.push_back({ParameterRef::Kind::junction, k});
                    break;
            }
        }
        for (int j = 0; j < decomp->n_charge; ++j)
            out.push_back({ParameterRef::Kind::gate_charge, j});
        if (circuit->topology().loop_count() == 1)
            out.push_back({ParameterRef::Kind::flux, 0});
        return out;
    }
};

inline HamiltonianContext make_context(const Circuit& c, const ModeDecomposition& d,
                                       const OperatorSet& ops) {
    HamiltonianContext ctx;
    ctx.circuit = &c;
    ctx.decomp = &d;
    ctx.ops = &ops;
    ctx.flux_ext = c.flux_ext();
    ctx.gate_charges = Eigen::VectorXd::Zero(d.n_charge);
    for (int j = 0; j < d.n_charge && j < static_cast<int>(c.gate_charges().size()); ++j)
        ctx.gate_charges(j) = c.gate_charges()[static_cast<std::size_t>(j)];
    return ctx;
}

inline SparseOperator assemble_hamiltonian(const HamiltonianContext& ctx) {
    return assemble_hamiltonian(*ctx.circuit, *ctx.decomp, *ctx.ops, ctx.flux_ext,
                                ctx.gate_charges);
}

/// dH/dx in hertz per parameter unit, in the computational basis.
inline SparseOperator hamiltonian_derivative(const HamiltonianContext& ctx,
                                             const ParameterRef& p) {
    const auto& d = *ctx.decomp;
    const auto& ops = *ctx.ops;
    const double h = constants::planck;
    const Eigen::VectorXd offsets = ops.charge_offsets(ctx.gate_charges);
    const auto& branches = ctx.circuit->topology().branches();
    const int fb = ctx.circuit->topology().flux_branch();

    switch (p.kind) {
        case ParameterRef::Kind::capacitor: {
            if (branches.at(static_cast<std::size_t>(p.index)).kind != ElementKind::capacitor)
                throw ConfigError("branch " + std::to_string(p.index) + " is not a capacitor");
            const Eigen::VectorXd w =
                ctx.circuit->topology().incidence(p.index).cast<double>();
            const Eigen::VectorXd g = d.R.transpose() * (d.cap_inv * w);
            const Eigen::MatrixXd m = -(g * g.transpose()) / h;
            return {ops.charge_quadratic(m, offsets), true};
        }
        case ParameterRef::Kind::inductor: {
            if (branches.at(static_cast<std::size_t>(p.index)).kind != ElementKind::inductor)
                throw ConfigError("branch " + std::to_string(p.index) + " is not an inductor");
            const double l = ctx.element_value(p.index);
            const Eigen::VectorXd wt =
                d.w_tilde[static_cast<std::size_t>(p.index)].head(d.n_harmonic);
            const Eigen::MatrixXd m = -(wt * wt.transpose()) / (l * l) / h;
            SpMat out = ops.flux_quadratic(m);
            if (p.index == fb) {
                // flux rides on this inductor: the linear term depends on l too
                const double coeff = -constants::flux_quantum / constants::two_pi *
                                     ctx.flux_ext / (l * l) / h;
                out += ops.flux_linear(coeff * wt);
            }
            return {std::move(out), true};
        }
        case ParameterRef::Kind::junction: {
            const int entry = ops.junction_entry_of_branch(p.index);
            return {SpMat(-ops.junction_cos(entry, ctx.junction_phase(p.index))), true};
        }
        case ParameterRef::Kind::gate_charge: {
            if (p.index < 0 || p.index >= d.n_charge)
                throw ConfigError("gate-charge island index out of range");
            Eigen::VectorXd coeff = Eigen::VectorXd::Zero(d.modes());
            for (int b = 0; b < d.n_charge; ++b)
                coeff(d.n_harmonic + b) = -constants::cooper_pair_charge *
                                          d.charge_cap_inv(p.index, b) / h;
            return {ops.charge_linear(coeff, offsets), true};
        }
        case ParameterRef::Kind::flux: {
            SpMat out(ops.dimension(), ops.dimension());
            if (fb < 0) return {std::move(out), true}; // no loop: zero operator
            if (branches[static_cast<std::size_t>(fb)].kind == ElementKind::junction) {
                const int entry = ops.junction_entry_of_branch(fb);
                const double ej = ctx.element_value(fb);
                out = SpMat(ej * ops.junction_sin(entry, ctx.junction_phase(fb)));
            } else {
                const double l = ctx.element_value(fb);
                const double coeff =
                    constants::flux_quantum / constants::two_pi / l / h;
                out = ops.flux_linear(
                    coeff * d.w_tilde[static_cast<std::size_t>(fb)].head(d.n_harmonic));
            }
            return {std::move(out), true};
        }
    }
    throw ConfigError("unknown parameter kind");
}

/// d^2H/dx dlambda. Nonvanishing only for the pairs
/// (flux, junction), (capacitor, gate charge), (gate charge, gate charge)
/// and (flux, flux); symmetric in its arguments.
inline SparseOperator hamiltonian_second_derivative(const HamiltonianContext& ctx,
                                                    ParameterRef x, ParameterRef l) {
    using K = ParameterRef::Kind;
    const auto& d = *ctx.decomp;
    const auto& ops = *ctx.ops;
    const double h = constants::planck;
    const int fb = ctx.circuit->topology().flux_branch();
    if (static_cast<int>(x.kind) > static_cast<int>(l.kind)) std::swap(x, l);

    SpMat zero(ops.dimension(), ops.dimension());

    if (x.kind == K::junction && l.kind == K::flux) {
        if (x.index != fb) return {std::move(zero), true};
        const int entry = ops.junction_entry_of_branch(x.index);
        return {SpMat(ops.junction_sin(entry, ctx.junction_phase(x.index))), true};
    }
    if (x.kind == K::capacitor && l.kind == K::gate_charge) {
        const Eigen::VectorXd w = ctx.circuit->topology().incidence(x.index).cast<double>();
        const Eigen::VectorXd g = d.R.transpose() * (d.cap_inv * w);
        const Eigen::VectorXd offsets = ops.charge_offsets(ctx.gate_charges);
        const Eigen::VectorXd coeff =
            constants::cooper_pair_charge * g(d.n_harmonic + l.index) * g / h;
        return {ops.charge_linear(coeff, offsets), true};
    }
    if (x.kind == K::gate_charge && l.kind == K::gate_charge) {
        const double v = constants::cooper_pair_charge * constants::cooper_pair_charge *
                         d.charge_cap_inv(x.index, l.index) / h;
        return {SpMat(Complex(v) * ops.identity()), true};
    }
    if (x.kind == K::flux && l.kind == K::flux) {
        if (fb < 0 ||
            ctx.circuit->topology().branches()[static_cast<std::size_t>(fb)].kind !=
                ElementKind::junction)
            return {std::move(zero), true};
        const int entry = ops.junction_entry_of_branch(fb);
        return {SpMat(ctx.element_value(fb) *
                      ops.junction_cos(entry, ctx.junction_phase(fb))),
                true};
    }
    return {std::move(zero), true};
}

/// Per-parameter gradient data over one spectrum: the n_E x n_E projections
/// G_p = V^dag (dH_p V), eigenvalue gradients on the diagonal, eigenvector
/// derivatives as coefficient vectors over the computed eigenbasis.
class GradientBundle {
public:
    GradientBundle(const HamiltonianContext& ctx, const Spectrum& spec,
                   const std::vector<ParameterRef>& params,
                   double degeneracy_rel_tol = 1e-6)
        : spec_(&spec), degeneracy_tol_(degeneracy_rel_tol *
                                        spec.freqs.cwiseAbs().maxCoeff()) {
        for (const auto& p : params) add_parameter(ctx, p);
    }

    void add_parameter(const HamiltonianContext& ctx, const ParameterRef& p) {
        if (grams_.count(p)) return;
        const SparseOperator dh = hamiltonian_derivative(ctx, p);
        grams_[p] = spec_->vecs.adjoint() * (dh.matrix * spec_->vecs);
    }

    const Eigen::MatrixXcd& gram(const ParameterRef& p) const {
        auto it = grams_.find(p);
        if (it == grams_.end())
            throw ConfigError("parameter " + p.name() + " missing from gradient bundle");
        return it->second;
    }

    bool has(const ParameterRef& p) const { return grams_.count(p) > 0; }

    /// Hellmann-Feynman eigenvalue gradient <f_i| dH/dx |f_i>.
    double eigenvalue_gradient(const ParameterRef& p, int i) const {
        return gram(p)(i, i).real();
    }

    /// Eigenvector derivative as coefficients over the computed eigenbasis:
    /// d|f_i>/dx = sum_{m != i} coeff_m |f_m>. Near-degenerate terms are
    /// skipped and flagged.
    Eigen::VectorXcd eigenvector_coeffs(const ParameterRef& p, int i) const {
        const auto& g = gram(p);
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(spec_->n_eig());
        for (int m = 0; m < spec_->n_eig(); ++m) {
            if (m == i) continue;
            const double gap = spec_->freqs(i) - spec_->freqs(m);
            if (std::abs(gap) < degeneracy_tol_) {
                degenerate_ = true;
                continue;
            }
            c(m) = g(m, i) / gap;
        }
        return c;
    }

    /// Total derivative of <f_i| O |f_j> for a parameter-independent operator
    /// given by its projection V^dag O V: bra and ket perturbation terms.
    Complex matrix_element_derivative(const ParameterRef& p, int i, int j,
                                      const Eigen::MatrixXcd& o_gram) const {
        const Eigen::VectorXcd ci = eigenvector_coeffs(p, i);
        const Eigen::VectorXcd cj = eigenvector_coeffs(p, j);
        Complex out(0.0, 0.0);
        for (int m = 0; m < spec_->n_eig(); ++m) {
            if (m != i) out += std::conj(ci(m)) * o_gram(m, j);
            if (m != j) out += o_gram(i, m) * cj(m);
        }
        return out;
    }

    bool degenerate_flagged() const { return degenerate_; }
    const Spectrum& spectrum() const { return *spec_; }

private:
    const Spectrum* spec_;
    double degeneracy_tol_;
    mutable bool degenerate_ = false;
    std::map<ParameterRef, Eigen::MatrixXcd> grams_;
};

inline double eigenvalue_gradient(const GradientBundle& b, const ParameterRef& p, int i) {
    return b.eigenvalue_gradient(p, i);
}

/// Materialized K-dimensional eigenvector derivative.
inline Eigen::VectorXcd eigenvector_gradient(const GradientBundle& b,
                                             const ParameterRef& p, int i) {
    return b.spectrum().vecs * b.eigenvector_coeffs(p, i);
}

/// Second derivative of the eigenfrequency difference f_i - f_j:
/// d^2 f_ij / dx dl via the analytic second-order Hamiltonian terms plus the
/// first-order eigenvector response.
inline double eigenvalue_second_gradient(const HamiltonianContext& ctx,
                                         const GradientBundle& b, ParameterRef x,
                                         ParameterRef l, int i, int j) {
    const Spectrum& spec = b.spectrum();
    const SparseOperator d2h = hamiltonian_second_derivative(ctx, x, l);
    const Eigen::MatrixXcd d2_gram =
        spec.vecs.adjoint() * (d2h.matrix * spec.vecs);
    const auto& gl = b.gram(l);
    auto state_term = [&](int s) {
        double out = d2_gram(s, s).real();
        const Eigen::VectorXcd cx = b.eigenvector_coeffs(x, s);
        Complex cross(0.0, 0.0);
        for (int m = 0; m < spec.n_eig(); ++m)
            if (m != s) cross += std::conj(cx(m)) * gl(m, s);
        return out + 2.0 * cross.real();
    };
    return state_term(i) - state_term(j);
}

/// Partial derivatives of a scalar loss with respect to the spectrum.
/// `dvec` columns are Wirtinger gradients with respect to conj(|f_i>), so a
/// real loss obeys dL = sum_i 2 Re <dvec_i, d|f_i>>.
struct LossPartials {
    std::map<ParameterRef, double> explicit_dx;
    Eigen::VectorXd dfreq;  // size n_E (may be empty)
    Eigen::MatrixXcd dvec;  // K x n_E (may be empty)
};

/// Chain rule dL/dx = dL/dx|_explicit + sum_i df_i/dx dL/df_i
///                  + sum_i 2 Re <dL/d|f_i>, d|f_i>/dx>.
inline std::map<ParameterRef, double> backprop_loss(
    const LossPartials& partials, const GradientBundle& b,
    const std::vector<ParameterRef>& params) {
    const Spectrum& spec = b.spectrum();
    Eigen::MatrixXcd vec_proj;
    if (partials.dvec.size() > 0) vec_proj = spec.vecs.adjoint() * partials.dvec;

    std::map<ParameterRef, double> out;
    for (const auto& p : params) {
        double total = 0.0;
        if (auto it = partials.explicit_dx.find(p); it != partials.explicit_dx.end())
            total += it->second;
        if (partials.dfreq.size() > 0)
            for (int i = 0; i < spec.n_eig() && i < partials.dfreq.size(); ++i)
                if (partials.dfreq(i) != 0.0)
                    total += b.eigenvalue_gradient(p, i) * partials.dfreq(i);
        if (partials.dvec.size() > 0) {
            for (int i = 0; i < spec.n_eig(); ++i) {
                const Eigen::VectorXcd c = b.eigenvector_coeffs(p, i);
                Complex acc(0.0, 0.0);
                for (int m = 0; m < spec.n_eig(); ++m)
                    if (m != i) acc += std::conj(vec_proj(m, i)) * c(m);
                total += 2.0 * acc.real();
            }
        }
        out[p] = total;
    }
    return out;
}

} // namespace circuitopt
