#pragma once

// Exact rational scalars. boost::multiprecision keeps values reduced with a
// positive denominator, which is exactly the invariant we need; everything on
// top of it (printing, parsing, hashing) lives here.

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace drcalc {

using Integer  = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer rat_num(const Rational& q) { return numerator(q); }
inline Integer rat_den(const Rational& q) { return denominator(q); }

// "p" for integers, "p/q" otherwise.
inline std::string rat_to_string(const Rational& q) {
    if (rat_den(q) == 1) return rat_num(q).str();
    return rat_num(q).str() + "/" + rat_den(q).str();
}

inline Rational rat_from_string(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(Integer(s));
        Integer num(s.substr(0, slash));
        Integer den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed rational literal: " + s);
    }
}

// n! as a Rational, for series coefficients.
inline Rational factorial(int n) {
    Integer f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return Rational(f);
}

inline Rational binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    Integer b = 1;
    for (int i = 0; i < k; ++i) { b *= (n - i); b /= (i + 1); }
    return Rational(b);
}

} // namespace drcalc
