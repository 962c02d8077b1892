// Exact rational linear algebra (row reduction, particular solutions, null
// spaces) plus polynomial determinants by Laplace expansion.  Everything here
// is desk-scale: matrices of at most a few dozen rows.
#pragma once

#include "msr/poly.hpp"

#include <optional>
#include <vector>

namespace msr {

using QMatrix = std::vector<std::vector<Rational>>;

struct RrefResult {
    QMatrix mat;                        // reduced row echelon form
    std::vector<std::size_t> pivot_cols;
    std::vector<std::size_t> pivot_rows; // original row index of each pivot
    std::size_t rank = 0;
};

inline RrefResult rref(QMatrix a) {
    RrefResult r;
    if (a.empty()) {
        r.mat = std::move(a);
        return r;
    }
    const std::size_t rows = a.size(), cols = a[0].size();
    std::vector<std::size_t> origin(rows);
    for (std::size_t i = 0; i < rows; ++i) origin[i] = i;

    std::size_t lead = 0;
    for (std::size_t col = 0; col < cols && lead < rows; ++col) {
        std::size_t piv = lead;
        while (piv < rows && a[piv][col] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[lead]);
        std::swap(origin[piv], origin[lead]);
        Rational inv = Rational(1) / a[lead][col];
        for (std::size_t j = col; j < cols; ++j) a[lead][j] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == lead || a[i][col] == 0) continue;
            Rational f = a[i][col];
            for (std::size_t j = col; j < cols; ++j) a[i][j] -= f * a[lead][j];
        }
        r.pivot_cols.push_back(col);
        r.pivot_rows.push_back(origin[lead]);
        ++lead;
    }
    r.rank = r.pivot_cols.size();
    r.mat = std::move(a);
    return r;
}

// Basis of { v : a v = 0 }.
inline std::vector<std::vector<Rational>> null_space(const QMatrix& a) {
    if (a.empty()) return {};
    const std::size_t cols = a[0].size();
    RrefResult r = rref(a);
    std::vector<bool> is_pivot(cols, false);
    for (std::size_t c : r.pivot_cols) is_pivot[c] = true;
    std::vector<std::vector<Rational>> basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rational> v(cols, Rational(0));
        v[free] = Rational(1);
        for (std::size_t k = 0; k < r.pivot_cols.size(); ++k)
            v[r.pivot_cols[k]] = -r.mat[k][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

// One solution of a x = b with free variables set to zero, or nullopt when
// the system is inconsistent.
inline std::optional<std::vector<Rational>> solve_particular(
    QMatrix a, const std::vector<Rational>& b) {
    if (a.size() != b.size()) throw EngineError("system size mismatch");
    if (a.empty()) return std::vector<Rational>{};
    const std::size_t cols = a[0].size();
    for (std::size_t i = 0; i < a.size(); ++i) a[i].push_back(b[i]);
    RrefResult r = rref(std::move(a));
    // a pivot in the appended column means 0 = 1
    if (!r.pivot_cols.empty() && r.pivot_cols.back() == cols) return std::nullopt;
    std::vector<Rational> x(cols, Rational(0));
    for (std::size_t k = 0; k < r.pivot_cols.size(); ++k)
        x[r.pivot_cols[k]] = r.mat[k][cols];
    return x;
}

// Determinant of a square polynomial matrix, Laplace expansion along the
// first column; adequate for the ≤ 7 x 7 systems this engine meets.
inline Poly poly_det(const std::vector<std::vector<Poly>>& m, const ChartPtr& chart) {
    const std::size_t n = m.size();
    if (n == 0) return Poly::constant(chart, Rational(1));
    for (const auto& row : m)
        if (row.size() != n) throw EngineError("determinant of non-square matrix");
    if (n == 1) return m[0][0];
    Poly acc = Poly::zero(chart);
    int sign = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (!m[i][0].is_zero()) {
            std::vector<std::vector<Poly>> minor;
            minor.reserve(n - 1);
            for (std::size_t r = 0; r < n; ++r) {
                if (r == i) continue;
                minor.emplace_back(m[r].begin() + 1, m[r].end());
            }
            acc += Rational(sign) * (m[i][0] * poly_det(minor, chart));
        }
        sign = -sign;
    }
    return acc;
}

} // namespace msr
