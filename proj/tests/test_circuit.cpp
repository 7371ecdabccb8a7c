#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Cholesky>

#include "circuitopt/circuit.hpp"
#include "support/oracles.hpp"

using namespace circuitopt;

TEST_CASE("single capacitor branch gives a 1x1 capacitance matrix") {
    const auto t = CircuitTopology::from_branches(2, {{0, 1, ElementKind::capacitor}});
    const Circuit c = realize_circuit(t, {{ElementKind::capacitor, 1e-12}});
    REQUIRE(c.cap_matrix().rows() == 1);
    CHECK(c.cap_matrix()(0, 0) == Catch::Approx(1e-12));
    CHECK(c.susceptance_matrix()(0, 0) == 0.0);
}

TEST_CASE("JJ capacitance and susceptance") {
    const auto t = parse_code("JJ");
    const Circuit c = realize_circuit(
        t, {{ElementKind::junction, 18e9}, {ElementKind::junction, 18e9},
            {ElementKind::capacitor, 1.08e-13}});
    CHECK(c.cap_matrix()(0, 0) == Catch::Approx(1.08e-13));
    CHECK(c.susceptance_matrix()(0, 0) == 0.0);
}

TEST_CASE("JLL susceptance stamp") {
    const auto t = parse_code("JLL");
    std::vector<Element> e;
    for (const auto& b : t.branches()) {
        if (b.kind == ElementKind::junction) e.emplace_back(b.kind, 5e9);
        if (b.kind == ElementKind::inductor) e.emplace_back(b.kind, 1e-6);
        if (b.kind == ElementKind::capacitor) e.emplace_back(b.kind, 1e-13);
    }
    const Circuit c = realize_circuit(t, e);
    // ring: J(0,1), L(1,2), L(2,0); susceptance couples ring neighbors 1 and 2
    CHECK(c.susceptance_matrix()(0, 1) == Catch::Approx(-1e6));
    CHECK(c.susceptance_matrix()(1, 0) == Catch::Approx(-1e6));
    CHECK(c.susceptance_matrix()(0, 0) == Catch::Approx(1e6));
    CHECK(c.susceptance_matrix()(1, 1) == Catch::Approx(2e6));
    CHECK(c.cap_matrix().isApprox(c.cap_matrix().transpose()));
}

TEST_CASE("capacitance matrix is positive definite for every sampled code") {
    for (const auto& code : enumerate_codes(4)) {
        const auto t = parse_code(code);
        Rng rng(hash_string(code));
        const Circuit c = realize_circuit(t, sample_elements(t, ElementBounds{}, rng));
        Eigen::LLT<Eigen::MatrixXd> llt(c.cap_matrix());
        INFO(code);
        CHECK(llt.info() == Eigen::Success);
    }
}

TEST_CASE("element validation") {
    const auto t = parse_code("JJ");
    CHECK_THROWS_AS(Element(ElementKind::capacitor, -1e-12), ConfigError);
    CHECK_THROWS_AS(
        realize_circuit(t, {{ElementKind::junction, 18e9}, {ElementKind::junction, 18e9},
                            {ElementKind::capacitor, 1.0}},
                        0.0, BoundsPolicy::enforce),
        ConfigError);
    // kind mismatch
    CHECK_THROWS_AS(
        realize_circuit(t, {{ElementKind::capacitor, 1e-13}, {ElementKind::junction, 18e9},
                            {ElementKind::capacitor, 1e-13}}),
        ConfigError);
}

TEST_CASE("sampling is deterministic and respects bounds") {
    const auto t = parse_code("JL");
    const auto a = sample_elements(t, ElementBounds{}, 1234u);
    const auto b = sample_elements(t, ElementBounds{}, 1234u);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].value == b[i].value);

    const ElementBounds bounds;
    Rng rng(7);
    const auto cap_topo =
        CircuitTopology::from_branches(2, {{0, 1, ElementKind::capacitor}});
    double lo = 1e300, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double v = sample_elements(cap_topo, bounds, rng)[0].value;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo >= bounds.cap_min);
    CHECK(hi <= bounds.cap_max);
}

TEST_CASE("sampled values are log-uniform (KS test)") {
    const auto cap_topo =
        CircuitTopology::from_branches(2, {{0, 1, ElementKind::capacitor}});
    const ElementBounds bounds;
    Rng rng(42);
    std::vector<double> u;
    const double llo = std::log(bounds.cap_min), lhi = std::log(bounds.cap_max);
    for (int i = 0; i < 10000; ++i) {
        const double v = sample_elements(cap_topo, bounds, rng)[0].value;
        u.push_back((std::log(v) - llo) / (lhi - llo));
    }
    CHECK(oracles::ks_uniform_pvalue(std::move(u)) > 0.01);
}
