#include <doctest.h>

#include "drcalc/drtable.hpp"

using namespace drcalc;

namespace {

EvalConfig nocache() {
    EvalConfig cfg;
    cfg.use_cache = false;
    return cfg;
}

// Locate a table entry by shape: number of edges, total edge-psi, divisor.
const std::pair<DecoratedStratum, MultiPoly>* find_entry(const DRTable& t, int edges, int edge_psi_total,
                                                         int kappa1, std::map<int, int> leg_psi) {
    for (const auto& [key, e] : t.entries) {
        int d = 0;
        for (int x : e.first.edge_psi) d += x;
        if (e.first.graph.num_edges() == edges && d == edge_psi_total &&
            e.first.divisor.kappa1 == kappa1 && e.first.divisor.leg_psi == leg_psi)
            return &e;
    }
    return nullptr;
}

MultiPoly bpow(int e) { return MultiPoly::var("b", e); }

} // namespace

TEST_CASE("normalization relation for charges") {
    Relation r11 = ambient_relation(1, 1);
    CHECK(r11.eliminated == "a1");
    // a1 = (2g-2+n) b = b
    CHECK(r11.solve() == MultiPoly::var("b"));
    Relation r20 = ambient_relation(2, 0);
    CHECK(r20.eliminated == "b");
    CHECK(r20.solve() == MultiPoly());
    CHECK_THROWS_AS(ambient_relation(1, 0), std::invalid_argument);
}

TEST_CASE("genus-1 one-marking table, codimension 1: hand values") {
    DRTable t = assemble_dr(1, 1, 1, TableFlavor::Full, ZagierStrategy::Laurent, nocache());
    auto* triv = find_entry(t, 0, 0, 0, {});
    REQUIRE(triv);
    CHECK(triv->second == MultiPoly(Rational(1)));
    // loop stratum: C(loop)/|Aut| = (-1/12)/2
    auto* loop = find_entry(t, 1, 0, 0, {});
    REQUIRE(loop);
    CHECK(loop->second == MultiPoly(Rational(-1, 24)));
    // psi_1 divisor: a_1^2/2 with a_1 = b
    auto* psi1 = find_entry(t, 0, 0, 0, {{1, 1}});
    REQUIRE(psi1);
    CHECK(psi1->second == Rational(1, 2) * bpow(2));
    // kappa_1 divisor: -b^2/2
    auto* kap = find_entry(t, 0, 0, 1, {});
    REQUIRE(kap);
    CHECK(kap->second == Rational(-1, 2) * bpow(2));
    CHECK(t.entries.size() == 4);
}

TEST_CASE("genus-1 one-marking table, codimension 2: hand values") {
    DRTable t = assemble_dr(1, 1, 2, TableFlavor::Full, ZagierStrategy::Laurent, nocache());
    CHECK(find_entry(t, 1, 0, 0, {{1, 1}})->second == Rational(-1, 48) * bpow(2));
    CHECK(find_entry(t, 1, 0, 1, {})->second == Rational(1, 48) * bpow(2));
    // loop with one edge-psi insertion: the edge series contributes the
    // scalar (-1)^1/2! on top of the subdivided-loop invariant.
    CHECK(find_entry(t, 1, 1, 0, {})->second == MultiPoly(Rational(1, 480)));
    CHECK(find_entry(t, 0, 0, 0, {{1, 2}})->second == Rational(1, 8) * bpow(4));
    CHECK(find_entry(t, 0, 0, 1, {{1, 1}})->second == Rational(-1, 4) * bpow(4));
    CHECK(find_entry(t, 0, 0, 2, {})->second == Rational(1, 8) * bpow(4));
}

TEST_CASE("coefficient extraction per stratum") {
    DRTable t = assemble_dr(1, 1, 2, TableFlavor::Full, ZagierStrategy::Laurent, nocache());
    auto m = extract_coefficient(t, Monomial{{"b", 2}}, 1);
    // psi_1 entry b^2/2 -> 1/2; kappa_1 entry -> -1/2; loop entry is constant.
    Rational got_psi = 0, got_kap = 0;
    int nonzero = 0;
    for (const auto& [key, e] : m) {
        if (e.second == 0) continue;
        ++nonzero;
        if (e.first.divisor.leg_psi.count(1)) got_psi = e.second;
        if (e.first.divisor.kappa1 == 1) got_kap = e.second;
    }
    CHECK(got_psi == Rational(1, 2));
    CHECK(got_kap == Rational(-1, 2));
    CHECK(nonzero == 2);

    // total degree above 2c: everything vanishes
    for (const auto& [key, e] : extract_coefficient(t, Monomial{{"b", 4}}, 1))
        CHECK(e.second == 0);

    CHECK_THROWS_AS(extract_coefficient(t, Monomial{{"a1", 1}}, 1), std::invalid_argument);
    CHECK_THROWS_AS(extract_coefficient(t, Monomial{{"b", 2}}, 3), std::invalid_argument);
}

TEST_CASE("entry degree bound and top flavor as homogeneous part") {
    for (auto [g, n] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 0}}) {
        DRTable full = assemble_dr(g, n, 2, TableFlavor::Full, ZagierStrategy::Laurent, nocache());
        DRTable top = assemble_dr(g, n, 2, TableFlavor::Top, ZagierStrategy::Laurent, nocache());
        for (const auto& [key, e] : full.entries) {
            int c = e.first.codim();
            CHECK(e.second.total_degree() <= 2 * c);
            MultiPoly want_top = e.second.homogeneous_part(2 * c);
            auto it = top.entries.find(key);
            MultiPoly got_top = (it == top.entries.end()) ? MultiPoly() : it->second.second;
            CHECK(got_top == want_top);
        }
        // top never has entries outside full
        for (const auto& [key, e] : top.entries) CHECK(full.entries.count(key));
    }
}

TEST_CASE("divisor entries factor through the exponential divisor expansion") {
    int g = 1, n = 2;
    DRTable t = assemble_dr(g, n, 2, TableFlavor::Full, ZagierStrategy::Laurent, nocache());
    Relation rel = ambient_relation(g, n);
    MultiPoly kappa_base = poly_normalize(Rational(-1, 2) * bpow(2), rel);
    std::map<int, MultiPoly> psi_base;
    for (int i = 1; i <= n; ++i)
        psi_base[i] = poly_normalize(Rational(1, 2) * MultiPoly::var("a" + std::to_string(i), 2), rel);

    for (const auto& [key, e] : t.entries) {
        const DivisorMonomial& d = e.first.divisor;
        if (d.codim() == 0) continue;
        // matching entry with trivial divisor
        DecoratedStratum base = e.first;
        base.divisor = DivisorMonomial{};
        auto it = t.entries.find(base.key());
        REQUIRE(it != t.entries.end());
        MultiPoly coeff = MultiPoly(Rational(1) / factorial(d.kappa1));
        for (int j = 0; j < d.kappa1; ++j) coeff *= kappa_base;
        for (const auto& [i, p] : d.leg_psi) {
            coeff *= Rational(1) / factorial(p);
            for (int j = 0; j < p; ++j) coeff *= psi_base.at(i);
        }
        CHECK(e.second == coeff * it->second.second);
    }
}

TEST_CASE("laurent and division strategies assemble identical tables") {
    DRTable a = assemble_dr(1, 1, 2, TableFlavor::Full, ZagierStrategy::Laurent, nocache());
    DRTable b = assemble_dr(1, 1, 2, TableFlavor::Full, ZagierStrategy::Division, nocache());
    REQUIRE(a.entries.size() == b.entries.size());
    for (const auto& [key, e] : a.entries) {
        REQUIRE(b.entries.count(key));
        CHECK(e.second == b.entries.at(key).second);
    }
}

TEST_CASE("refinement expands symmetric edge decorations binomially") {
    DRTable t = assemble_dr(1, 1, 2, TableFlavor::Full, ZagierStrategy::Laurent, nocache());
    RefinedTable r = refine(t);
    // loop with one edge-psi (coarse 1/480) splits over {psi, psi'}; on a loop
    // both placements are the same refined stratum, so one entry of 2 * 1/480.
    int hits = 0;
    for (const auto& [key, e] : r.entries) {
        const RefinedStratum& s = e.first;
        if (s.graph.num_edges() != 1 || s.codim() != 2 || s.kappa1 != std::vector<int>{0} ||
            !s.leg_psi.empty())
            continue;
        CHECK(s.half_psi[0][0] + s.half_psi[0][1] == 1);  // either loop side
        CHECK(e.second == MultiPoly(Rational(1, 240)));
        ++hits;
    }
    CHECK(hits == 1);
    // coarse and refined totals agree entry-count-wise on undecorated strata
    for (const auto& [key, e] : t.entries) {
        bool undecorated = e.first.divisor.codim() == 0;
        for (int d : e.first.edge_psi) undecorated = undecorated && d == 0;
        if (!undecorated) continue;
        RefinedStratum s;
        s.graph = e.first.graph;
        s.half_psi.assign(e.first.graph.num_edges(), {0, 0});
        s.kappa1.assign(e.first.graph.num_vertices(), 0);
        auto it = r.entries.find(s.key());
        REQUIRE(it != r.entries.end());
        CHECK(it->second.second == e.second);
    }
}

TEST_CASE("gluing two markings produces the expected loop stratum") {
    // one-vertex genus-0 table with 3 markings, codim 0: the trivial stratum.
    SpecializationData spec;
    spec.b = MultiPoly::var("b");
    for (int i = 1; i <= 3; ++i) spec.leg_charges.push_back(MultiPoly::var("a" + std::to_string(i)));
    spec.ambient = ambient_relation(1, 1);
    DRTable t = assemble_dr_with_charges(0, 3, 0, TableFlavor::Full, spec, ZagierStrategy::Laurent,
                                         nocache());
    RefinedTable r = glue_refined(refine(t), 2, 3);
    REQUIRE(r.entries.size() == 1);
    const RefinedStratum& s = r.entries.begin()->second.first;
    CHECK(r.g == 1);
    CHECK(r.n == 1);
    CHECK(s.graph.num_edges() == 1);
    CHECK(s.graph.edges[0].tail == s.graph.edges[0].head);
    CHECK(s.graph.num_legs() == 1);
    CHECK(r.entries.begin()->second.second == MultiPoly(Rational(1)));
}

TEST_CASE("forgetful pushforward of the codim-1 genus-1 strata") {
    // DR_1^1(b; a1, a2) pushed along forgetting marking 2, checked against the
    // comparison rules by hand:
    //   psi_2 entry a2^2/2 -> kappa_0-type scalar terms via psi^1 -> 2g-2+n = 1
    DRTable t = assemble_dr(1, 2, 1, TableFlavor::Full, ZagierStrategy::Laurent, nocache());
    RefinedTable p = forget_pushforward(t);
    // Divisibility by (a_2 - b)^2 holds entry-wise (theorem, verified in the
    // checks module); here just confirm shapes: outputs live on (1,1) strata.
    for (const auto& [key, e] : p.entries) {
        CHECK(e.first.graph.leg_vertex(2) == -1);
        CHECK(e.first.codim() <= 0);
    }
}

TEST_CASE("stratum keys are invariant under edge reorder and orientation flips") {
    StableGraph theta;
    theta.vertices = {{0, {}}, {0, {}}};
    theta.edges = {{0, 1}, {0, 1}, {0, 1}};
    StableGraph flipped = theta;
    flipped.edges[1] = {1, 0};
    std::swap(flipped.edges[0], flipped.edges[2]);
    DecoratedStratum a{theta, {0, 1, 0}, {}};
    DecoratedStratum b{flipped, {0, 1, 0}, {}};
    CHECK(a.key() == b.key());
    DecoratedStratum c{theta, {1, 1, 0}, {}};
    CHECK(a.key() != c.key());
}

TEST_CASE("refined keys identify isomorphic decorated strata") {
    // two presentations of the same 2-banana with asymmetric half-edge psi
    StableGraph G1;
    G1.vertices = {{1, {}}, {0, {1, 2, 3}}};
    G1.edges = {{0, 1}, {0, 1}};
    StableGraph G2 = G1;
    std::swap(G2.edges[0], G2.edges[1]);
    G2.edges[0] = {1, 0};  // flip orientation as well

    // edge 0 of G2 is oriented v1 -> v0, so the same psi (on the genus-1
    // vertex) sits in the head slot there; the decorated edge moved to slot 1
    RefinedStratum s1{G1, {{1, 0}, {0, 0}}, {}, {0, 0}};
    RefinedStratum s2{G2, {{0, 0}, {1, 0}}, {}, {0, 0}};
    CHECK(s1.key() == s2.key());
    RefinedStratum s2b{G2, {{0, 1}, {0, 0}}, {}, {0, 0}};
    CHECK(s1.key() == s2b.key());
    RefinedStratum s3{G1, {{0, 1}, {0, 0}}, {}, {0, 0}};
    CHECK(s1.key() != s3.key());
}
