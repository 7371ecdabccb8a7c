#include <catch2/catch_amalgamated.hpp>

#include <chrono>

#include "circuitopt/spectrum.hpp"
#include "circuitopt/truncation.hpp"
#include "support/circuits.hpp"
#include "support/oracles.hpp"

using namespace circuitopt;
using Catch::Approx;

namespace {

struct Prepared {
    Circuit circuit;
    ModeDecomposition decomp;
    OperatorSet ops;
    Spectrum spec;
};

Prepared prepare(const Circuit& c, HilbertConfig cfg, int n_eig = 10,
                 SolverOptions solver = {}) {
    auto d = compute_transformation(c);
    OperatorSet ops(c, d, cfg);
    Eigen::VectorXd ng = Eigen::VectorXd::Zero(d.n_charge);
    for (int j = 0; j < d.n_charge && j < static_cast<int>(c.gate_charges().size()); ++j)
        ng(j) = c.gate_charges()[static_cast<std::size_t>(j)];
    Spectrum s = diagonalize(assemble_hamiltonian(c, d, ops, c.flux_ext(), ng), n_eig,
                             cfg, solver);
    return {c, std::move(d), std::move(ops), std::move(s)};
}

} // namespace

TEST_CASE("iterative path equals the dense path on a transmon") {
    const Circuit c = testcircuits::transmon(10e9, 12e-15);
    SolverOptions dense_opts;
    const Prepared dense = prepare(c, HilbertConfig({101}, 0), 6, dense_opts);

    SolverOptions lanczos_opts;
    lanczos_opts.dense_cutoff = 0; // force the iterative solver
    const Prepared sparse = prepare(c, HilbertConfig({101}, 0), 6, lanczos_opts);

    for (int i = 0; i < 6; ++i)
        CHECK(oracles::rel_err(dense.spec.freqs(i), sparse.spec.freqs(i)) < 1e-10);
}

TEST_CASE("iterative path equals the dense path on every 2-node code") {
    for (const auto& code : enumerate_codes(2)) {
        const auto t = parse_code(code);
        Circuit c = realize_circuit(t, sample_elements(t, ElementBounds{}, 17), 0.4);
        const auto d = compute_transformation(c);
        HilbertConfig cfg;
        cfg.n_harmonic = d.n_harmonic;
        cfg.trunc.push_back(d.n_harmonic == 1 ? 180 : 181);
        OperatorSet ops(c, d, cfg);
        const auto h = assemble_hamiltonian(c, d, ops, c.flux_ext(),
                                            Eigen::VectorXd::Zero(d.n_charge));

        const Spectrum dense = diagonalize(h, 8, cfg);
        SolverOptions lopts;
        lopts.dense_cutoff = 0;
        const Spectrum sparse = diagonalize(h, 8, cfg, lopts);
        for (int i = 0; i < 8; ++i) {
            INFO(code << " level " << i);
            CHECK(std::abs(dense.freqs(i) - sparse.freqs(i)) <
                  1e-10 * std::abs(dense.freqs(7)));
        }
    }
}

TEST_CASE("Sycamore flux-tunable transmon reproduces the reported qubit frequency") {
    const Prepared p = prepare(testcircuits::sycamore(0.01), HilbertConfig({31}, 0), 4);
    CHECK(p.spec.qubit_freq() == Approx(7.013e9).epsilon(0.02));
}

TEST_CASE("eigenvector residuals and normalization") {
    const Prepared p = prepare(testcircuits::heavy_fluxonium(0.3),
                               HilbertConfig({150}, 1), 6);
    for (int i = 0; i < 6; ++i) CHECK(p.spec.vecs.col(i).norm() == Approx(1.0).margin(1e-12));
    for (int i = 0; i + 1 < 6; ++i) CHECK(p.spec.freqs(i) <= p.spec.freqs(i + 1));
}

TEST_CASE("convergence error limits") {
    // identical embedded vectors -> 0; orthogonal -> 1
    HilbertConfig small({5}, 1), large({7}, 1);
    Spectrum a{Eigen::VectorXd::Zero(1), Eigen::MatrixXcd::Zero(5, 1), small};
    a.vecs(2, 0) = 1.0;
    Spectrum b{Eigen::VectorXd::Zero(1), Eigen::MatrixXcd::Zero(7, 1), large};
    b.vecs(2, 0) = 1.0;
    CHECK(convergence_error(a, b, 0) == Approx(0.0).margin(1e-15));

    Spectrum ortho = b;
    ortho.vecs.setZero();
    ortho.vecs(6, 0) = 1.0;
    CHECK(convergence_error(a, ortho, 0) == Approx(1.0).margin(1e-15));

    // phase invariance
    Spectrum phased = b;
    phased.vecs *= std::exp(Complex(0.0, 1.234));
    CHECK(convergence_error(a, phased, 0) == Approx(0.0).margin(1e-15));
}

TEST_CASE("charge-mode embedding is centered") {
    // |n=1> in a 5-dim window sits at local index 3; in 7-dim at index 4
    const auto map = embedding_indices(HilbertConfig({5}, 0), HilbertConfig({7}, 0));
    CHECK(map[3] == 4);
    CHECK(map[0] == 1);
}

TEST_CASE("converged transmon passes the convergence check") {
    const Prepared p = prepare(testcircuits::transmon(10e9, 12e-15),
                               HilbertConfig({101}, 0), 4);
    const Spectrum p103 =
        prepare(testcircuits::transmon(10e9, 12e-15), HilbertConfig({103}, 0), 4).spec;
    CHECK(convergence_error(p.spec, p103, 2) < 1e-10);

    ConvergenceOptions opts;
    CHECK(check_convergence(p.circuit, p.decomp, p.spec, opts));
    opts.threshold = 1.0;
    CHECK(check_convergence(p.circuit, p.decomp, p.spec, opts));
}

TEST_CASE("under-truncated heavy fluxonium fails the convergence check") {
    const Prepared p = prepare(testcircuits::heavy_fluxonium(0.4999),
                               HilbertConfig({6}, 1), 3);
    ConvergenceOptions opts;
    CHECK_FALSE(check_convergence(p.circuit, p.decomp, p.spec, opts));
    opts.threshold = 1.0; // epsilon <= 1 always
    CHECK(check_convergence(p.circuit, p.decomp, p.spec, opts));
}

TEST_CASE("convergence error decreases with truncation on random JL circuits") {
    const auto t = parse_code("JL");
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Circuit c = realize_circuit(t, sample_elements(t, ElementBounds{}, seed), 1.1);
        const auto d = compute_transformation(c);
        double prev = 2.0;
        for (int m : {24, 48, 96, 192}) {
            const Prepared p = prepare(c, HilbertConfig({m}, 1), 3);
            const double eps = convergence_probe(p.circuit, p.decomp, p.spec);
            INFO("seed " << seed << " m " << m);
            CHECK(eps <= prev + 1e-12);
            prev = eps;
        }
    }
}

TEST_CASE("flux sweep of an LC resonator is flat") {
    const Circuit c = testcircuits::lc_resonator();
    const auto d = compute_transformation(c);
    OperatorSet ops(c, d, HilbertConfig({40}, 1));
    Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(7, 0.0, constants::two_pi * 6 / 7);
    const SweepResult r = sweep(c, d, ops, SweepParameter::flux, grid, 4);
    for (Eigen::Index i = 1; i < grid.size(); ++i)
        CHECK((r.freqs.row(i) - r.freqs.row(0)).cwiseAbs().maxCoeff() <
              1e-12 * r.freqs(0, 3));
}

TEST_CASE("charge sweep endpoints coincide by periodicity") {
    const Circuit c = testcircuits::transmon(3e9, 2e-15); // charge-sensitive regime
    const auto d = compute_transformation(c);
    OperatorSet ops(c, d, HilbertConfig({21}, 0));
    Eigen::VectorXd grid(3);
    grid << 0.0, 0.5, 1.0;
    const SweepResult r = sweep(c, d, ops, SweepParameter::charge_diagonal, grid, 4);
    CHECK((r.freqs.row(0) - r.freqs.row(2)).cwiseAbs().maxCoeff() <
          1e-10 * std::abs(r.freqs(0, 3)));
    // and the middle of the band differs in this regime
    CHECK(std::abs(r.freqs(1, 0) - r.freqs(0, 0)) > 1e-4 * std::abs(r.freqs(0, 0)));
}

TEST_CASE("fluxonium spectrum is symmetric about half flux") {
    const Circuit c = testcircuits::fluxonium(5e9, 8e-7, 3e-14, 0.0);
    const auto d = compute_transformation(c);
    OperatorSet ops(c, d, HilbertConfig({80}, 1));
    Eigen::VectorXd grid(4);
    const double delta = 0.8;
    grid << constants::pi - delta, constants::pi + delta, constants::pi - 2.1,
        constants::pi + 2.1;
    const SweepResult r = sweep(c, d, ops, SweepParameter::flux, grid, 5);
    CHECK((r.freqs.row(0) - r.freqs.row(1)).cwiseAbs().maxCoeff() <
          1e-8 * std::abs(r.freqs(0, 4)));
    CHECK((r.freqs.row(2) - r.freqs.row(3)).cwiseAbs().maxCoeff() <
          1e-8 * std::abs(r.freqs(0, 4)));
}

TEST_CASE("runtime: LC diagonalization is fast") {
    const auto start = std::chrono::steady_clock::now();
    const Prepared p = prepare(testcircuits::lc_resonator(), HilbertConfig({60}, 1), 10);
    const auto elapsed = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start);
    CHECK(elapsed.count() < 1.0);
    CHECK(p.spec.n_eig() == 10);
}
