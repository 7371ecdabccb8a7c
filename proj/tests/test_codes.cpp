#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "circuitopt/code.hpp"

using namespace circuitopt;

namespace {

int count_kind(const CircuitTopology& t, ElementKind k) {
    return static_cast<int>(t.branches_of(k).size());
}

/// Independent cycle count of the inductive subgraph, straight from the
/// E - V + components formula.
int inductive_cycle_rank(const CircuitTopology& t) {
    const int n = t.node_count();
    std::vector<int> parent(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
        return x;
    };
    int cycles = 0;
    for (const auto& b : t.branches()) {
        if (b.kind == ElementKind::capacitor) continue;
        const int ra = find(b.node_a), rb = find(b.node_b);
        if (ra == rb)
            ++cycles;
        else
            parent[static_cast<std::size_t>(ra)] = rb;
    }
    return cycles;
}

} // namespace

TEST_CASE("parse JL(JC): fluxonium capacitively coupled to a Cooper pair box") {
    const auto t = parse_code("JL(JC)");
    CHECK(t.node_count() == 3);
    CHECK(t.loop_count() == 1);
    CHECK(count_kind(t, ElementKind::junction) == 2);
    CHECK(count_kind(t, ElementKind::inductor) == 1);
    // group J between nodes 1-2, group C between 2-0, all-to-all fills (0,1), (1,2)
    CHECK(count_kind(t, ElementKind::capacitor) == 3);
    CHECK(t.branches()[0] == Branch{0, 1, ElementKind::junction});
    CHECK(t.branches()[1] == Branch{1, 0, ElementKind::inductor});
    CHECK(t.branches()[2] == Branch{1, 2, ElementKind::junction});
    CHECK(t.branches()[3] == Branch{2, 0, ElementKind::capacitor});
}

TEST_CASE("parse JJ: two junctions in parallel shunted by one capacitor") {
    const auto t = parse_code("JJ");
    CHECK(t.node_count() == 2);
    CHECK(t.loop_count() == 1);
    REQUIRE(t.branches().size() == 3);
    CHECK(t.branches()[0].kind == ElementKind::junction);
    CHECK(t.branches()[1].kind == ElementKind::junction);
    CHECK(t.branches()[2].kind == ElementKind::capacitor);
    // flux is assigned to the first junction of the loop
    CHECK(t.flux_branch() == 0);
}

TEST_CASE("parse rejects bad grammar") {
    CHECK_THROWS_AS(parse_code("JX"), ParseError);
    CHECK_THROWS_AS(parse_code("J"), ParseError);
    CHECK_THROWS_AS(parse_code(""), ParseError);
    CHECK_THROWS_AS(parse_code("JJ("), ParseError);
    CHECK_THROWS_AS(parse_code("JJ()"), ParseError);
    CHECK_THROWS_AS(parse_code("CJ"), ParseError);
    // group without capacitor would close a second inductive loop
    CHECK_THROWS_AS(parse_code("JJ(JL)"), ParseError);
    // five nodes
    CHECK_THROWS_AS(parse_code("JJJJJ"), ParseError);
    CHECK_THROWS_AS(parse_code("JJJ(JC)(JC)"), ParseError);
}

TEST_CASE("emit round trips") {
    CHECK(emit_code(parse_code("JJJ")) == "JJJ");
    CHECK(emit_code(parse_code("JL(JC)")) == "JL(JC)");
    CHECK(emit_code(parse_code("JJ(JC)")) == "JJ(JC)");
    // reflection equivalence
    CHECK(emit_code(parse_code("LJ")) == "JL");

    const auto hand_built = CircuitTopology::from_loop_items(
        {{'J', ""}, {'L', ""}, {'J', ""}, {'L', ""}});
    CHECK(emit_code(hand_built) == "JLJL");

    CHECK(parse_code(emit_code(parse_code("JL(JC)"))).structurally_equal(parse_code("JL(JC)")));
}

TEST_CASE("emit rejects explicit non-ring topologies") {
    const auto t = CircuitTopology::from_branches(
        2, {{0, 1, ElementKind::inductor}, {0, 1, ElementKind::capacitor}});
    CHECK_THROWS_AS(emit_code(t), ConfigError);
}

TEST_CASE("enumerate_codes covers the expected families") {
    const auto two = enumerate_codes(2);
    const std::set<std::string> two_set(two.begin(), two.end());
    CHECK(two_set.count("JJ") == 1);
    CHECK(two_set.count("JL") == 1);
    CHECK(two_set.count("LL") == 1); // distinct from JJ
    CHECK(two_set.count("LJ") == 0); // reflection duplicate removed

    const auto four = enumerate_codes(4);
    const std::set<std::string> four_set(four.begin(), four.end());
    for (const auto* code : {"JJ", "JL", "JJJ", "JJL", "JLL", "JJ(JC)", "JL(JC)",
                             "JJJJ", "JJJL", "JLJL"})
        CHECK(four_set.count(code) == 1);

    CHECK_THROWS_AS(enumerate_codes(1), ConfigError);
    CHECK_THROWS_AS(enumerate_codes(5), ConfigError);
}

TEST_CASE("enumerated codes: canonical round trip, one inductive loop, Kirchhoff") {
    for (const auto& code : enumerate_codes(4)) {
        INFO(code);
        const auto t = parse_code(code);
        CHECK(emit_code(t) == code);
        CHECK(t.loop_count() == 1);
        CHECK(inductive_cycle_rank(t) == 1);

        // each incidence vector sums to -1, 0 or +1
        for (std::size_t k = 0; k < t.branches().size(); ++k) {
            const int s = t.incidence(static_cast<int>(k)).sum();
            CHECK(s >= -1);
            CHECK(s <= 1);
        }
        // signed sum around the inductive loop vanishes
        Eigen::VectorXi loop_sum = Eigen::VectorXi::Zero(t.dof());
        for (std::size_t i = 0; i < t.loop_branch_indices().size(); ++i)
            loop_sum += t.loop_branch_signs()[i] *
                        t.incidence(t.loop_branch_indices()[i]);
        CHECK(loop_sum.isZero());

        // flux branch prefers junctions
        const auto& branches = t.branches();
        bool loop_has_junction = false;
        for (int k : t.loop_branch_indices())
            if (branches[static_cast<std::size_t>(k)].kind == ElementKind::junction)
                loop_has_junction = true;
        if (loop_has_junction)
            CHECK(branches[static_cast<std::size_t>(t.flux_branch())].kind ==
                  ElementKind::junction);
    }
}

TEST_CASE("all-to-all capacitors are present between every node pair") {
    for (const auto& code : enumerate_codes(4)) {
        const auto t = parse_code(code);
        for (int a = 0; a < t.node_count(); ++a)
            for (int b = a + 1; b < t.node_count(); ++b) {
                bool found = false;
                for (const auto& br : t.branches()) {
                    if (br.kind != ElementKind::capacitor) continue;
                    if (std::min(br.node_a, br.node_b) == a &&
                        std::max(br.node_a, br.node_b) == b)
                        found = true;
                }
                INFO(code << " pair " << a << "," << b);
                CHECK(found);
            }
    }
}
