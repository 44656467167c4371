#pragma once

// Bernoulli numbers in the convention generated by u/(e^u - 1), i.e. B_1 = -1/2,
// and the negative-zeta regularization built on them:
//     sum_{k>=1} k^{d+1}  :=  zeta(-d-1)  =  -B_{d+2}/(d+2).

#include "drcalc/rational.hpp"

#include <mutex>
#include <vector>

namespace drcalc {

// B_m via the defining recurrence sum_{j=0}^{m} C(m+1,j) B_j = 0 (m >= 1),
// which for the u/(e^u-1) convention reads B_m = -1/(m+1) sum_{j<m} C(m+1,j) B_j.
inline Rational bernoulli(int m) {
    if (m < 0) throw std::invalid_argument("bernoulli: negative index");
    static std::vector<Rational> table{Rational(1)};
    static std::mutex lock;
    std::scoped_lock guard(lock);
    while ((int)table.size() <= m) {
        int n = (int)table.size();
        Rational acc = 0;
        for (int j = 0; j < n; ++j) acc += binomial(n + 1, j) * table[j];
        table.push_back(-acc / Rational(n + 1));
    }
    return table[m];
}

// zeta(-d-1) for d >= 0; zeta_reg(0) = -1/12, zeta_reg(2) = 1/120.
inline Rational zeta_reg(int d) {
    if (d < 0) throw std::invalid_argument("zeta_reg: negative index");
    return -bernoulli(d + 2) / Rational(d + 2);
}

} // namespace drcalc
