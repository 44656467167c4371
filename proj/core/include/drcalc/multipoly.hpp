#pragma once

// Sparse exact multivariate polynomials over Rational, with named variables.
// Monomials are maps variable -> exponent (exponents > 0 only; the empty map is
// the constant monomial). Follows the usual map-of-maps idiom.

#include "drcalc/bernoulli.hpp"
#include "drcalc/rational.hpp"

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace drcalc {

using Monomial = std::map<std::string, int>;

inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
    Monomial r = a;
    for (const auto& [v, e] : b) {
        int ne = (r[v] += e);
        if (ne == 0) r.erase(v);
    }
    return r;
}

inline int mono_degree(const Monomial& m) {
    int d = 0;
    for (const auto& [v, e] : m) d += e;
    return d;
}

class MultiPoly {
public:
    std::map<Monomial, Rational> terms;

    MultiPoly() = default;
    explicit MultiPoly(const Rational& c) {
        if (c != 0) terms[{}] = c;
    }
    MultiPoly(long c) : MultiPoly(Rational(c)) {}

    static MultiPoly var(const std::string& v, int exp = 1) {
        MultiPoly p;
        if (exp == 0) return MultiPoly(Rational(1));
        p.terms[{{v, exp}}] = 1;
        return p;
    }

    bool is_zero() const { return terms.empty(); }

    bool is_constant() const {
        return terms.empty() || (terms.size() == 1 && terms.begin()->first.empty());
    }

    Rational constant_term() const {
        auto it = terms.find(Monomial{});
        return it == terms.end() ? Rational(0) : it->second;
    }

    // As a Rational; throws if non-constant.
    Rational as_rational() const {
        if (!is_constant()) throw std::logic_error("MultiPoly: not a constant: " + to_string());
        return constant_term();
    }

    void add_term(const Monomial& m, const Rational& c) {
        if (c == 0) return;
        auto it = terms.find(m);
        if (it == terms.end()) {
            terms.emplace(m, c);
        } else {
            it->second += c;
            if (it->second == 0) terms.erase(it);
        }
    }

    MultiPoly& operator+=(const MultiPoly& o) {
        for (const auto& [m, c] : o.terms) add_term(m, c);
        return *this;
    }
    MultiPoly& operator-=(const MultiPoly& o) {
        for (const auto& [m, c] : o.terms) add_term(m, -c);
        return *this;
    }
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator-(const MultiPoly& a) {
        MultiPoly r;
        for (const auto& [m, c] : a.terms) r.terms.emplace(m, -c);
        return r;
    }

    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
        MultiPoly r;
        for (const auto& [ma, ca] : a.terms)
            for (const auto& [mb, cb] : b.terms) r.add_term(mono_mul(ma, mb), ca * cb);
        return r;
    }
    MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }

    friend MultiPoly operator*(const Rational& c, const MultiPoly& a) {
        MultiPoly r;
        if (c == 0) return r;
        for (const auto& [m, q] : a.terms) r.terms.emplace(m, c * q);
        return r;
    }
    MultiPoly& operator*=(const Rational& c) { return *this = c * *this; }
    friend MultiPoly operator/(const MultiPoly& a, const Rational& c) {
        if (c == 0) throw std::invalid_argument("MultiPoly: division by zero");
        return Rational(1) / c * a;
    }

    bool operator==(const MultiPoly& o) const { return terms == o.terms; }
    bool operator!=(const MultiPoly& o) const { return terms != o.terms; }
    bool operator<(const MultiPoly& o) const { return terms < o.terms; }

    MultiPoly pow(int e) const {
        if (e < 0) throw std::invalid_argument("MultiPoly: negative power");
        MultiPoly r(Rational(1));
        for (int i = 0; i < e; ++i) r *= *this;
        return r;
    }

    int total_degree() const {
        int d = 0;
        for (const auto& [m, c] : terms) d = std::max(d, mono_degree(m));
        return d;
    }

    int degree_in(const std::string& v) const {
        int d = 0;
        for (const auto& [m, c] : terms) {
            auto it = m.find(v);
            if (it != m.end()) d = std::max(d, it->second);
        }
        return d;
    }

    std::set<std::string> variables() const {
        std::set<std::string> vs;
        for (const auto& [m, c] : terms)
            for (const auto& [v, e] : m) vs.insert(v);
        return vs;
    }

    MultiPoly homogeneous_part(int d) const {
        MultiPoly r;
        for (const auto& [m, c] : terms)
            if (mono_degree(m) == d) r.terms.emplace(m, c);
        return r;
    }

    // The degree-grading derivation: each monomial scaled by its total degree.
    MultiPoly degree_scaled() const {
        MultiPoly r;
        for (const auto& [m, c] : terms) r.add_term(m, Rational(mono_degree(m)) * c);
        return r;
    }

    // Substitute one variable by a polynomial (which may mention the variable
    // itself only if it cancels; callers here never do that).
    MultiPoly substitute(const std::string& v, const MultiPoly& repl) const {
        MultiPoly r;
        for (const auto& [m, c] : terms) {
            auto it = m.find(v);
            if (it == m.end()) {
                r.add_term(m, c);
                continue;
            }
            Monomial rest = m;
            int e = it->second;
            rest.erase(v);
            MultiPoly part;
            part.terms.emplace(rest, c);
            r += part * repl.pow(e);
        }
        return r;
    }

    // Partial evaluation at exact points.
    MultiPoly evaluate(const std::map<std::string, Rational>& point) const {
        MultiPoly r;
        for (const auto& [m, c] : terms) {
            Rational coeff = c;
            Monomial rest;
            for (const auto& [v, e] : m) {
                auto it = point.find(v);
                if (it == point.end()) {
                    rest[v] = e;
                } else {
                    for (int i = 0; i < e; ++i) coeff *= it->second;
                }
            }
            r.add_term(rest, coeff);
        }
        return r;
    }

    // Coefficient of v^e, a polynomial in the remaining variables.
    MultiPoly coefficient_of(const std::string& v, int e) const {
        MultiPoly r;
        for (const auto& [m, c] : terms) {
            auto it = m.find(v);
            int have = (it == m.end()) ? 0 : it->second;
            if (have != e) continue;
            Monomial rest = m;
            rest.erase(v);
            r.add_term(rest, c);
        }
        return r;
    }

    MultiPoly derivative(const std::string& v) const {
        MultiPoly r;
        for (const auto& [m, c] : terms) {
            auto it = m.find(v);
            if (it == m.end()) continue;
            Monomial d = m;
            int e = it->second;
            if (e == 1) d.erase(v); else d[v] = e - 1;
            r.add_term(d, Rational(e) * c);
        }
        return r;
    }

    std::string to_string() const {
        if (terms.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [m, c] : terms) {
            if (!first) os << " + ";
            first = false;
            os << rat_to_string(c);
            for (const auto& [v, e] : m) {
                os << "*" << v;
                if (e != 1) os << "^" << e;
            }
        }
        return os.str();
    }
};

// A linear relation sum(form) = 0 used to normalize polynomials, solved for one
// designated variable (e.g. a_1 + ... + a_n - (2g-2+n) b = 0 eliminating a_1).
struct Relation {
    MultiPoly form;          // degree <= 1, must mention `eliminated`
    std::string eliminated;

    // Expression substituted for the eliminated variable.
    MultiPoly solve() const {
        Rational coeff = 0;
        MultiPoly rest;
        for (const auto& [m, c] : form.terms) {
            if (m.size() == 1 && m.begin()->first == eliminated && m.begin()->second == 1)
                coeff = c;
            else
                rest.add_term(m, c);
        }
        if (coeff == 0) throw std::invalid_argument("Relation: form does not mention " + eliminated);
        return -Rational(1) / coeff * rest;
    }
};

inline MultiPoly poly_normalize(const MultiPoly& p, const Relation& rel) {
    return p.substitute(rel.eliminated, rel.solve());
}

// sum_{k>=1} p(k) under the negative-zeta convention; constant terms are
// divergent sums the paper never produces, rejected unless strict = false.
inline Rational regularize_poly_sum(const MultiPoly& p, const std::string& k, bool strict = true) {
    Rational acc = 0;
    for (const auto& [m, c] : p.terms) {
        if (m.empty()) {
            if (strict && c != 0)
                throw std::domain_error("regularize_poly_sum: constant term has no regularized value");
            continue; // maps to 0 under the documented convention
        }
        if (m.size() != 1 || m.begin()->first != k)
            throw std::invalid_argument("regularize_poly_sum: polynomial mentions variables besides " + k);
        int e = m.begin()->second;
        acc += c * zeta_reg(e - 1); // zeta(-e) = -B_{e+1}/(e+1)
    }
    return acc;
}

enum class BernoulliRule { PlainB, NegBShift2 };

// k^d -> B_d, or k^d -> -B_{d+2}, term-wise.
inline Rational substitute_bernoulli(const MultiPoly& p, const std::string& k, BernoulliRule rule) {
    Rational acc = 0;
    for (const auto& [m, c] : p.terms) {
        int e = 0;
        if (!m.empty()) {
            if (m.size() != 1 || m.begin()->first != k)
                throw std::invalid_argument("substitute_bernoulli: polynomial mentions variables besides " + k);
            e = m.begin()->second;
        }
        acc += c * (rule == BernoulliRule::PlainB ? bernoulli(e) : -bernoulli(e + 2));
    }
    return acc;
}

// Image of p under v -> c + t with t-powers beyond `order` dropped.
inline MultiPoly expand_and_truncate(const MultiPoly& p, const std::string& v, const MultiPoly& center,
                                     const std::string& t, int order) {
    MultiPoly shifted = p.substitute(v, center + MultiPoly::var(t));
    MultiPoly r;
    for (const auto& [m, c] : shifted.terms) {
        auto it = m.find(t);
        if (it != m.end() && it->second > order) continue;
        r.add_term(m, c);
    }
    return r;
}

// Variable-wise regularization helper: treats p as a polynomial in k with
// MultiPoly coefficients and applies sum_{k>=1} to that variable only.
inline MultiPoly regularize_in_var(const MultiPoly& p, const std::string& k, bool strict = true) {
    MultiPoly r;
    for (const auto& [m, c] : p.terms) {
        auto it = m.find(k);
        Monomial rest = m;
        Rational factor;
        if (it == m.end()) {
            if (strict && c != 0)
                throw std::domain_error("regularize_in_var: constant term in " + k);
            continue;
        }
        factor = zeta_reg(it->second - 1);
        rest.erase(k);
        r.add_term(rest, c * factor);
    }
    return r;
}

// Variable-wise Bernoulli substitution with MultiPoly coefficients.
inline MultiPoly substitute_bernoulli_in_var(const MultiPoly& p, const std::string& k, BernoulliRule rule) {
    MultiPoly r;
    for (const auto& [m, c] : p.terms) {
        auto it = m.find(k);
        int e = (it == m.end()) ? 0 : it->second;
        Monomial rest = m;
        rest.erase(k);
        r.add_term(rest, c * (rule == BernoulliRule::PlainB ? bernoulli(e) : -bernoulli(e + 2)));
    }
    return r;
}

} // namespace drcalc
