#include <doctest.h>

#include "drcalc/series.hpp"

using namespace drcalc;

namespace {
const std::vector<std::string> XY{"X", "Y"};
const SeriesLimits LIM{8, -8, 8};
} // namespace

TEST_CASE("series arithmetic and truncation window") {
    TruncSeries x = TruncSeries::from_poly(MultiPoly::var("X"), XY, LIM);
    TruncSeries p = (x + TruncSeries::one(XY, LIM)).pow(3);
    CHECK(p.coefficient_at({}).as_rational() == 1);
    CHECK(p.coefficient_at({{"X", 2}}).as_rational() == 3);
    CHECK(p.coefficient_at({{"X", 3}}).as_rational() == 1);
    // coefficient variables ride along untouched
    TruncSeries q = TruncSeries::from_poly(MultiPoly::var("a") * MultiPoly::var("X"), XY, LIM);
    CHECK((q * q).coefficient_at({{"X", 2}}) == MultiPoly::var("a", 2));
    // cap: X^9 is dropped
    TruncSeries x9 = x.pow(9);
    CHECK(x9.is_zero());
}

TEST_CASE("exp of a positive-valuation series matches factorial coefficients") {
    TruncSeries x = TruncSeries::from_poly(MultiPoly::var("X"), XY, LIM);
    TruncSeries e = exp_of(x);
    for (int j = 0; j <= 8; ++j)
        CHECK(e.coefficient_at(j ? Monomial{{"X", j}} : Monomial{}).as_rational() ==
              Rational(1) / factorial(j));
    CHECK_THROWS_AS(exp_of(TruncSeries::one(XY, LIM)), std::invalid_argument);
}

TEST_CASE("geometric inverse against known expansions") {
    // 1/(1 - X) = sum X^j
    TruncSeries f = TruncSeries::one(XY, LIM) - TruncSeries::from_poly(MultiPoly::var("X"), XY, LIM);
    TruncSeries inv = inverse_of(f);
    for (int j = 0; j <= 8; ++j)
        CHECK(inv.coefficient_at(j ? Monomial{{"X", j}} : Monomial{}).as_rational() == 1);
    CHECK((f * inv).coefficient_at({}).as_rational() == 1);
    CHECK_THROWS_AS(inverse_of(TruncSeries::from_poly(MultiPoly::var("X"), XY, LIM)), std::domain_error);
}

TEST_CASE("bernoulli generating function identity u = (e^u - 1) * gf(u)") {
    std::vector<std::string> U{"U"};
    SeriesLimits lim{10, -10, 10};
    TruncSeries gf = bernoulli_gf("U", U, lim);
    TruncSeries u = TruncSeries::from_poly(MultiPoly::var("U"), U, lim);
    TruncSeries em1 = exp_of(u) - TruncSeries::one(U, lim);
    TruncSeries prod = em1 * gf;
    // product should be exactly u through the cap
    for (int j = 0; j < 10; ++j)
        CHECK(prod.coefficient_at(j ? Monomial{{"U", j}} : Monomial{}).as_rational() ==
              (j == 1 ? 1 : 0));
}

TEST_CASE("laurent inversion of a linear form, leading variable first in the order") {
    // 1/(X - Y) with X leading: sum_j Y^j / X^{j+1}
    MultiPoly form = MultiPoly::var("X") - MultiPoly::var("Y");
    TruncSeries inv = laurent_invert_linear(form, XY, LIM);
    for (int j = 0; j <= 6; ++j) {
        Monomial m{{"X", -1 - j}};
        if (j > 0) m["Y"] = j;
        CHECK(inv.coefficient_at(m).as_rational() == 1);
    }
    CHECK(inv.coefficient_at({{"X", -1}, {"Y", 1}}).is_zero());
    // multiplying back gives 1 on the window interior
    TruncSeries check = TruncSeries::from_poly(form, XY, LIM) * inv;
    CHECK(check.coefficient_at({}).as_rational() == 1);
    CHECK(check.coefficient_at({{"X", -3}, {"Y", 3}}).is_zero());

    // order decides the expansion: 1/(2Y) has no X at all
    TruncSeries invy = laurent_invert_linear(Rational(2) * MultiPoly::var("Y"), XY, LIM);
    CHECK(invy.coefficient_at({{"Y", -1}}).as_rational() == Rational(1, 2));
    CHECK_THROWS_AS(laurent_invert_linear(MultiPoly::var("X", 2), XY, LIM), std::invalid_argument);
}

TEST_CASE("composition of a coefficient list with a linear form") {
    // f(u) = 1 + u + u^2 at u = X + Y
    std::vector<Rational> coeffs{1, 1, 1};
    TruncSeries c = compose_linear(coeffs, MultiPoly::var("X") + MultiPoly::var("Y"), XY, LIM);
    CHECK(c.coefficient_at({}).as_rational() == 1);
    CHECK(c.coefficient_at({{"X", 1}}).as_rational() == 1);
    CHECK(c.coefficient_at({{"X", 1}, {"Y", 1}}).as_rational() == 2);
    CHECK(c.coefficient_at({{"Y", 2}}).as_rational() == 1);
}
