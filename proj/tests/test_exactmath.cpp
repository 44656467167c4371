#include <doctest.h>

#include "drcalc/bernoulli.hpp"
#include "drcalc/linalg.hpp"
#include "drcalc/multipoly.hpp"
#include "drcalc/rational.hpp"

using namespace drcalc;

TEST_CASE("rational parsing and printing round-trip") {
    CHECK(rat_to_string(Rational(-3, 7)) == "-3/7");
    CHECK(rat_to_string(Rational(5)) == "5");
    CHECK(rat_from_string("22/7") == Rational(22, 7));
    CHECK(rat_from_string("-4") == Rational(-4));
    CHECK(rat_from_string(rat_to_string(Rational(123456789, 987654321))) ==
          Rational(123456789, 987654321));
    CHECK_THROWS_AS(rat_from_string("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(rat_from_string("abc"), std::invalid_argument);
}

TEST_CASE("bernoulli numbers against the defining recurrence table") {
    CHECK(bernoulli(0) == Rational(1));
    CHECK(bernoulli(1) == Rational(-1, 2));
    CHECK(bernoulli(2) == Rational(1, 6));
    CHECK(bernoulli(3) == Rational(0));
    CHECK(bernoulli(4) == Rational(-1, 30));
    CHECK(bernoulli(6) == Rational(1, 42));
    CHECK(bernoulli(8) == Rational(-1, 30));
    CHECK(bernoulli(10) == Rational(5, 66));
    CHECK(bernoulli(12) == Rational(-691, 2730));
}

TEST_CASE("regularized power sums = zeta at negative integers") {
    // zeta_reg(d) = zeta(-d-1) = -B_{d+2}/(d+2)
    CHECK(zeta_reg(0) == Rational(-1, 12));
    CHECK(zeta_reg(1) == Rational(0));
    CHECK(zeta_reg(2) == Rational(1, 120));
    CHECK(zeta_reg(3) == Rational(0));

    MultiPoly p = Rational(3) * MultiPoly::var("k") + MultiPoly::var("k", 3);
    CHECK(regularize_poly_sum(p, "k") == Rational(3) * Rational(-1, 12) + Rational(1, 120));
    MultiPoly with_const = p + MultiPoly(Rational(1));
    CHECK_THROWS_AS(regularize_poly_sum(with_const, "k"), std::domain_error);
    CHECK(regularize_poly_sum(with_const, "k", false) == regularize_poly_sum(p, "k"));
}

TEST_CASE("polynomial arithmetic basics") {
    MultiPoly x = MultiPoly::var("x"), y = MultiPoly::var("y");
    MultiPoly p = (x + y).pow(2);
    CHECK(p == x * x + Rational(2) * x * y + y * y);
    CHECK(p.total_degree() == 2);
    CHECK(p.degree_in("x") == 2);
    CHECK(p.coefficient_of("x", 1) == Rational(2) * y);
    CHECK(p.substitute("y", -x).is_zero());
    CHECK(p.evaluate({{"x", Rational(2)}, {"y", Rational(3)}}).as_rational() == 25);
    CHECK(p.derivative("x") == Rational(2) * (x + y));
    CHECK((x * y).homogeneous_part(2) == x * y);
    CHECK((x + x * y).degree_scaled() == x + Rational(2) * x * y);
}

TEST_CASE("relation normalization eliminates the designated variable") {
    // x + y + z = 0, eliminate x
    Relation rel;
    rel.form = MultiPoly::var("x") + MultiPoly::var("y") + MultiPoly::var("z");
    rel.eliminated = "x";
    MultiPoly p = MultiPoly::var("x", 2);
    MultiPoly q = poly_normalize(p, rel);
    CHECK(q == (MultiPoly::var("y") + MultiPoly::var("z")).pow(2));
    CHECK(q.degree_in("x") == 0);
}

TEST_CASE("exact linear solving flags rank and consistency") {
    // unique + consistent, with a redundant row
    std::vector<std::vector<Rational>> A{{1, 1}, {1, -1}, {2, 0}};
    std::vector<Rational> b{3, 1, 4};
    auto sol = solve_exact(A, b);
    CHECK(sol.unique);
    CHECK(sol.consistent);
    CHECK(sol.solution[0] == 2);
    CHECK(sol.solution[1] == 1);

    std::vector<std::vector<Rational>> A2{{1, 1}, {2, 2}};
    std::vector<Rational> inconsistent{1, 3};
    CHECK_FALSE(solve_exact(A2, inconsistent).consistent);
    std::vector<Rational> degenerate{1, 2};
    auto sol2 = solve_exact(A2, degenerate);
    CHECK(sol2.consistent);
    CHECK_FALSE(sol2.unique);
}

TEST_CASE("newton interpolation reproduces exact polynomials") {
    // p(x) = (2x^3 - x + 5)/3
    auto p = [](const Rational& x) { return (Rational(2) * x * x * x - x + 5) / Rational(3); };
    std::vector<Rational> xs, ys;
    for (int i = 7; i < 12; ++i) { xs.push_back(i); ys.push_back(p(i)); }
    auto c = newton_interpolate(xs, ys);
    REQUIRE(c.size() == 4);
    CHECK(c[0] == Rational(5, 3));
    CHECK(c[1] == Rational(-1, 3));
    CHECK(c[2] == 0);
    CHECK(c[3] == Rational(2, 3));
    CHECK(eval_poly(c, Rational(100)) == p(100));
}

TEST_CASE("bernoulli substitution rules") {
    MultiPoly p = MultiPoly(Rational(1)) + MultiPoly::var("k", 2);
    CHECK(substitute_bernoulli(p, "k", BernoulliRule::PlainB) == bernoulli(0) + bernoulli(2));
    CHECK(substitute_bernoulli(p, "k", BernoulliRule::NegBShift2) == -bernoulli(2) - bernoulli(4));
}

TEST_CASE("truncated re-expansion around a center") {
    // x^3 around x = c + t, keeping t-order <= 1: c^3 + 3 c^2 t
    MultiPoly p = MultiPoly::var("x", 3);
    MultiPoly c = MultiPoly::var("c");
    MultiPoly got = expand_and_truncate(p, "x", c, "t", 1);
    MultiPoly want = MultiPoly::var("c", 3) + Rational(3) * MultiPoly::var("c", 2) * MultiPoly::var("t");
    CHECK(got == want);
}
