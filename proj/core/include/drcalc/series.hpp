#pragma once

// Truncated multivariate Laurent series in an ordered set of "series" variables
// (the z_e of the Zagier formula, or X/Y/U in the scalar identities), with
// coefficients that are exact polynomials in everything else (charge variables).
//
// Truncation state: a total-degree cap over the series variables plus a
// per-variable exponent window [floor, ceil]. Negative exponents only ever
// enter through laurent_invert_linear; the declared variable order decides
// which variable of a linear form is expanded around (the earliest in the
// order is the "largest").

#include "drcalc/multipoly.hpp"

#include <algorithm>
#include <vector>

namespace drcalc {

struct SeriesLimits {
    int total_cap = 8;   // keep z-total-degree <= total_cap
    int floor = -10;     // per-variable exponent window
    int ceil = 10;

    bool keeps(const Monomial& m) const {
        if (mono_degree(m) > total_cap) return false;
        for (const auto& [v, e] : m)
            if (e < floor || e > ceil) return false;
        return true;
    }
};

class TruncSeries {
public:
    std::vector<std::string> order; // series variables, leading first
    SeriesLimits lim;
    std::map<Monomial, MultiPoly> terms; // z-exponent vector -> coefficient

    TruncSeries() = default;
    TruncSeries(std::vector<std::string> ord, SeriesLimits l) : order(std::move(ord)), lim(l) {}

    bool is_series_var(const std::string& v) const {
        return std::find(order.begin(), order.end(), v) != order.end();
    }

    void add_term(const Monomial& m, const MultiPoly& c) {
        if (c.is_zero() || !lim.keeps(m)) return;
        auto it = terms.find(m);
        if (it == terms.end()) {
            terms.emplace(m, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms.erase(it);
        }
    }

    static TruncSeries one(std::vector<std::string> ord, SeriesLimits l) {
        TruncSeries s(std::move(ord), l);
        s.add_term({}, MultiPoly(Rational(1)));
        return s;
    }

    // Split a polynomial's monomials into series part and coefficient part.
    static TruncSeries from_poly(const MultiPoly& p, std::vector<std::string> ord, SeriesLimits l) {
        TruncSeries s(std::move(ord), l);
        for (const auto& [m, c] : p.terms) {
            Monomial zpart, cpart;
            for (const auto& [v, e] : m)
                (s.is_series_var(v) ? zpart : cpart)[v] = e;
            MultiPoly coeff;
            coeff.terms.emplace(cpart, c);
            s.add_term(zpart, coeff);
        }
        return s;
    }

    bool is_zero() const { return terms.empty(); }

    // Smallest z-total-degree present (0 for the empty series, by convention).
    int min_degree() const {
        bool first = true;
        int d = 0;
        for (const auto& [m, c] : terms) {
            int md = mono_degree(m);
            if (first || md < d) d = md;
            first = false;
        }
        return d;
    }

    TruncSeries& operator+=(const TruncSeries& o) {
        for (const auto& [m, c] : o.terms) add_term(m, c);
        return *this;
    }
    friend TruncSeries operator+(TruncSeries a, const TruncSeries& b) { return a += b; }
    friend TruncSeries operator-(const TruncSeries& a) {
        TruncSeries r(a.order, a.lim);
        for (const auto& [m, c] : a.terms) r.terms.emplace(m, -c);
        return r;
    }
    TruncSeries& operator-=(const TruncSeries& o) { return *this += -o; }
    friend TruncSeries operator-(TruncSeries a, const TruncSeries& b) { return a -= b; }

    friend TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) {
        TruncSeries r(a.order, a.lim);
        for (const auto& [ma, ca] : a.terms)
            for (const auto& [mb, cb] : b.terms) {
                Monomial m = mono_mul(ma, mb);
                if (r.lim.keeps(m)) r.add_term(m, ca * cb);
            }
        return r;
    }
    TruncSeries& operator*=(const TruncSeries& o) { return *this = *this * o; }

    friend TruncSeries operator*(const MultiPoly& c, const TruncSeries& a) {
        TruncSeries r(a.order, a.lim);
        for (const auto& [m, q] : a.terms) r.add_term(m, c * q);
        return r;
    }
    friend TruncSeries operator*(const Rational& c, const TruncSeries& a) {
        return MultiPoly(c) * a;
    }

    TruncSeries pow(int e) const {
        TruncSeries r = one(order, lim);
        for (int i = 0; i < e; ++i) r *= *this;
        return r;
    }

    // Multiply by a single z-monomial (may carry negative exponents).
    TruncSeries shifted(const Monomial& shift, const MultiPoly& coeff = MultiPoly(Rational(1))) const {
        TruncSeries r(order, lim);
        for (const auto& [m, c] : terms) r.add_term(mono_mul(m, shift), coeff * c);
        return r;
    }

    MultiPoly coefficient_at(const Monomial& m) const {
        auto it = terms.find(m);
        return it == terms.end() ? MultiPoly() : it->second;
    }

    TruncSeries derivative(const std::string& v) const {
        TruncSeries r(order, lim);
        for (const auto& [m, c] : terms) {
            auto it = m.find(v);
            if (it == m.end() || it->second == 0) continue;
            Monomial d = m;
            int e = it->second;
            if (e == 1) d.erase(v); else d[v] = e - 1;
            r.add_term(d, Rational(e) * c);
        }
        return r;
    }
};

// exp of a series with strictly positive z-valuation in every term.
inline TruncSeries exp_of(const TruncSeries& f) {
    for (const auto& [m, c] : f.terms)
        if (mono_degree(m) < 1)
            throw std::invalid_argument("exp_of: argument has a term of series degree < 1");
    TruncSeries r = TruncSeries::one(f.order, f.lim);
    TruncSeries p = TruncSeries::one(f.order, f.lim);
    for (int j = 1; j <= f.lim.total_cap; ++j) {
        p *= f;
        if (p.is_zero()) break;
        r += Rational(1) / factorial(j) * p;
    }
    return r;
}

// Inverse of a series whose z-constant term is an invertible scalar.
inline TruncSeries inverse_of(const TruncSeries& f) {
    auto it = f.terms.find(Monomial{});
    if (it == f.terms.end() || !it->second.is_constant() || it->second.constant_term() == 0)
        throw std::domain_error("inverse_of: no unit leading term under the declared order");
    Rational c0 = it->second.constant_term();
    // f = c0 (1 - g), g of positive valuation: 1/f = (1/c0) sum g^j.
    TruncSeries g = TruncSeries::one(f.order, f.lim) - Rational(1) / c0 * f;
    TruncSeries r = TruncSeries::one(f.order, f.lim);
    TruncSeries p = TruncSeries::one(f.order, f.lim);
    int span = f.lim.total_cap - std::min(0, f.lim.floor * (int)f.order.size());
    for (int j = 1; j <= span; ++j) {
        p *= g;
        if (p.is_zero()) break;
        r += p;
    }
    return Rational(1) / c0 * r;
}

// u/(e^u - 1) = sum B_m u^m / m!.
inline TruncSeries bernoulli_gf(const std::string& u, std::vector<std::string> order, SeriesLimits lim) {
    TruncSeries s(std::move(order), lim);
    for (int m = 0; m <= lim.total_cap; ++m)
        s.add_term(m == 0 ? Monomial{} : Monomial{{u, m}}, MultiPoly(bernoulli(m) / factorial(m)));
    return s;
}

// 1/f for a nonzero linear form f = sum c_v z_v with scalar coefficients,
// expanded around the order-leading variable of f.
inline TruncSeries laurent_invert_linear(const MultiPoly& f, const std::vector<std::string>& order,
                                         SeriesLimits lim) {
    if (lim.floor >= lim.ceil)
        throw std::invalid_argument("laurent_invert_linear: empty window");
    std::map<std::string, Rational> coeffs;
    for (const auto& [m, c] : f.terms) {
        if (m.size() != 1 || m.begin()->second != 1)
            throw std::invalid_argument("laurent_invert_linear: not a homogeneous linear form");
        coeffs[m.begin()->first] = c;
    }
    std::string lead;
    for (const auto& v : order)
        if (coeffs.count(v)) { lead = v; break; }
    if (lead.empty())
        throw std::invalid_argument("laurent_invert_linear: no leading variable under the declared order");
    Rational c = coeffs[lead];
    MultiPoly rest = f - c * MultiPoly::var(lead);

    TruncSeries r(order, lim);
    TruncSeries restpow = TruncSeries::one(order, lim);
    TruncSeries rests = TruncSeries::from_poly(rest, order, lim);
    Rational cpow = c;
    for (int j = 0;; ++j) {
        if (-1 - j < lim.floor) break;
        Rational sign = (j % 2 == 0) ? Rational(1) : Rational(-1);
        TruncSeries part = restpow.shifted(Monomial{{lead, -1 - j}}, MultiPoly(sign / cpow));
        r += part;
        if (j > 0 && restpow.is_zero()) break;
        restpow *= rests;
        cpow *= c;
        if (rest.is_zero()) break;
    }
    return r;
}

// Substitute a linear form for the variable of a univariate coefficient list:
// sum coeff[d] * form^d, used to compose one-variable series with z_{e,T}.
inline TruncSeries compose_linear(const std::vector<Rational>& coeffs, const MultiPoly& form,
                                  const std::vector<std::string>& order, SeriesLimits lim) {
    TruncSeries formpow = TruncSeries::one(order, lim);
    TruncSeries forms = TruncSeries::from_poly(form, order, lim);
    TruncSeries r(order, lim);
    for (size_t d = 0; d < coeffs.size(); ++d) {
        if (coeffs[d] != 0) r += coeffs[d] * formpow;
        if ((int)d >= lim.total_cap) break;
        formpow *= forms;
        if (formpow.is_zero() && d + 1 < coeffs.size() && !form.is_zero()) break;
    }
    return r;
}

} // namespace drcalc
