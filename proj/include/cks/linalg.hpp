#pragma once

#include <optional>
#include <vector>

#include "cks/rational.hpp"

namespace cks::linalg {

using Matrix = std::vector<RatVec>;  // row-major

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref(Matrix& a)
{
    std::vector<std::size_t> pivots;
    if (a.empty()) return pivots;
    const std::size_t rows = a.size(), cols = a[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c].is_zero()) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        Rat inv = Rat(1) / a[r][c];
        for (auto& x : a[r]) x *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c].is_zero()) continue;
            Rat f = a[i][c];
            for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline std::size_t rank(Matrix a) { return rref(a).size(); }

/// Solves the square system m x = b; nullopt if singular.
inline std::optional<RatVec> solve(const Matrix& m, const RatVec& b)
{
    const std::size_t n = m.size();
    Matrix aug(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i].size() != n) throw Error(ErrorCode::DimensionMismatch, "solve: non-square system");
        aug[i] = m[i];
        aug[i].push_back(b[i]);
    }
    auto piv = rref(aug);
    if (piv.size() < n || piv.back() >= n) return std::nullopt;
    RatVec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = aug[i][n];
    return x;
}

/// Basis of the right kernel {x : m x = 0} for an r x n matrix.
inline Matrix kernel(Matrix m, std::size_t n)
{
    if (m.empty()) {
        Matrix id(n, zeros(n));
        for (std::size_t i = 0; i < n; ++i) id[i][i] = 1;
        return id;
    }
    auto piv = rref(m);
    std::vector<bool> is_pivot(n, false);
    for (auto c : piv) is_pivot[c] = true;
    Matrix basis;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        RatVec v = zeros(n);
        v[f] = 1;
        for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -m[r][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

inline Rat det(Matrix a)
{
    const std::size_t n = a.size();
    Rat d(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c].is_zero()) ++p;
        if (p == n) return Rat(0);
        if (p != c) {
            std::swap(a[p], a[c]);
            d = -d;
        }
        d *= a[c][c];
        for (std::size_t i = c + 1; i < n; ++i) {
            if (a[i][c].is_zero()) continue;
            Rat f = a[i][c] / a[c][c];
            for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    return d;
}

/// Calls fn(indices) for every k-subset of {0..n-1} in lexicographic order.
template <class Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn)
{
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        fn(static_cast<const std::vector<std::size_t>&>(idx));
        if (k == 0) return;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace cks::linalg
