#pragma once

// Exact Gaussian elimination for (possibly overdetermined) systems with a
// Rational matrix; the right-hand side may be Rational or MultiPoly valued.
// Overdetermined rows act as built-in consistency checks.

#include "drcalc/multipoly.hpp"

#include <optional>
#include <vector>

namespace drcalc {

template <typename T>
struct LinearSolveResult {
    bool unique = false;     // full column rank
    bool consistent = false; // no contradictory row
    std::vector<T> solution;
};

template <typename T>
LinearSolveResult<T> solve_exact(std::vector<std::vector<Rational>> A, std::vector<T> b) {
    size_t rows = A.size(), cols = rows ? A[0].size() : 0;
    LinearSolveResult<T> res;
    std::vector<int> pivot_row(cols, -1);
    size_t rank = 0;
    for (size_t col = 0; col < cols && rank < rows; ++col) {
        size_t piv = rank;
        while (piv < rows && A[piv][col] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(A[piv], A[rank]);
        std::swap(b[piv], b[rank]);
        Rational p = A[rank][col];
        for (size_t c = col; c < cols; ++c) A[rank][c] /= p;
        b[rank] = Rational(1) / p * b[rank];
        for (size_t r = 0; r < rows; ++r) {
            if (r == rank || A[r][col] == 0) continue;
            Rational f = A[r][col];
            for (size_t c = col; c < cols; ++c) A[r][c] -= f * A[rank][c];
            b[r] = b[r] - f * b[rank];
        }
        pivot_row[col] = (int)rank;
        ++rank;
    }
    res.consistent = true;
    T zero{};
    for (size_t r = rank; r < rows; ++r)
        if (!(b[r] == zero)) res.consistent = false;
    res.unique = true;
    res.solution.assign(cols, zero);
    for (size_t col = 0; col < cols; ++col) {
        if (pivot_row[col] < 0) {
            res.unique = false;
            continue;
        }
        res.solution[col] = b[pivot_row[col]];
    }
    return res;
}

// Newton interpolation through exact points; returned as coefficient list
// (index = power).
inline std::vector<Rational> newton_interpolate(const std::vector<Rational>& xs,
                                                const std::vector<Rational>& ys) {
    size_t n = xs.size();
    std::vector<Rational> dd = ys; // divided differences, in place
    for (size_t level = 1; level < n; ++level)
        for (size_t i = n - 1; i >= level; --i)
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
    // expand sum dd[i] * prod_{j<i} (x - xs[j])
    std::vector<Rational> coeffs(n, Rational(0)), basis{Rational(1)};
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < basis.size(); ++j) coeffs[j] += dd[i] * basis[j];
        if (i + 1 < n) {
            basis.push_back(Rational(0));
            for (size_t j = basis.size() - 1; j > 0; --j)
                basis[j] = basis[j - 1] - xs[i] * basis[j];
            basis[0] = -xs[i] * basis[0];
        }
    }
    while (coeffs.size() > 1 && coeffs.back() == 0) coeffs.pop_back();
    return coeffs;
}

inline Rational eval_poly(const std::vector<Rational>& coeffs, const Rational& x) {
    Rational acc = 0;
    for (size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
    return acc;
}

} // namespace drcalc
