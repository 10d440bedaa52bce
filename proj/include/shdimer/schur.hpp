#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "common.hpp"
#include "partition.hpp"

namespace shdimer {

// ---------------------------------------------------------------------------
// SSYT-sum evaluation: oracle-grade, exact, guarded.
// ---------------------------------------------------------------------------

namespace detail {

// Enumerate semistandard tableaux of shape p with entries in 1..N by filling
// cells row-major; calls visit(weight-exponent-vector) per tableau.
inline void ssyt_walk(const Partition& p, size_t N, std::vector<int>& colAbove,
                      std::vector<int>& curRow, size_t row, size_t col,
                      std::vector<int>& expo, long long& count, long long guard,
                      const std::function<void(const std::vector<int>&)>& visit) {
    if (row == p.length()) {
        if (++count > guard) throw std::runtime_error("ssyt enumeration guard exceeded");
        visit(expo);
        return;
    }
    long long rowLen = p.part(row);
    if (col == static_cast<size_t>(rowLen)) {
        // advance to next row
        std::vector<int> savedAbove = colAbove;
        colAbove = curRow;
        std::vector<int> savedRow(curRow.size(), 0);
        std::swap(curRow, savedRow);
        ssyt_walk(p, N, colAbove, curRow, row + 1, 0, expo, count, guard, visit);
        std::swap(curRow, savedRow);
        colAbove = savedAbove;
        return;
    }
    int lo = 1;
    if (col < colAbove.size() && colAbove[col] > 0) lo = colAbove[col] + 1; // strict down columns
    if (col > 0) lo = std::max(lo, curRow[col - 1]);                       // weak along rows
    for (int v = lo; v <= static_cast<int>(N); ++v) {
        curRow[col] = v;
        ++expo[static_cast<size_t>(v - 1)];
        ssyt_walk(p, N, colAbove, curRow, row, col + 1, expo, count, guard, visit);
        --expo[static_cast<size_t>(v - 1)];
        curRow[col] = 0;
    }
}

} // namespace detail

inline Rat schur_ssyt(const Partition& p, const std::vector<Rat>& u,
                      long long guard = 1000000) {
    size_t N = p.length();
    if (u.size() != N) throw std::invalid_argument("schur_ssyt: |u| != length(p)");
    if (N == 0) return Rat(1);
    Rat acc = 0;
    std::vector<int> colAbove(static_cast<size_t>(p.part(0)), 0);
    std::vector<int> curRow(static_cast<size_t>(p.part(0)), 0);
    std::vector<int> expo(N, 0);
    long long count = 0;
    detail::ssyt_walk(p, N, colAbove, curRow, 0, 0, expo, count, guard,
                      [&](const std::vector<int>& e) {
                          Rat term = 1;
                          for (size_t i = 0; i < N; ++i)
                              for (int k = 0; k < e[i]; ++k) term *= u[i];
                          acc += term;
                      });
    return acc;
}

// ---------------------------------------------------------------------------
// Bialternant det(u_i^{lambda_j+N-j}) / Vandermonde, exact; u pairwise distinct.
// ---------------------------------------------------------------------------

inline Rat det_exact(std::vector<std::vector<Rat>> m) {
    size_t n = m.size();
    Rat det = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && m[piv][c] == 0) ++piv;
        if (piv == n) return Rat(0);
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (size_t r = c + 1; r < n; ++r) {
            if (m[r][c] == 0) continue;
            Rat f = m[r][c] / m[c][c];
            for (size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return det;
}

inline Rat schur_bialternant(const Partition& p, const std::vector<Rat>& u) {
    size_t N = p.length();
    if (u.size() != N) throw std::invalid_argument("schur_bialternant: |u| != length(p)");
    if (N == 0) return Rat(1);
    for (size_t i = 0; i < N; ++i)
        for (size_t j = i + 1; j < N; ++j)
            if (u[i] == u[j])
                throw std::invalid_argument("schur_bialternant: repeated variables");
    auto powr = [](const Rat& b, long long e) {
        Rat r = 1, base = b;
        long long k = e;
        while (k > 0) {
            if (k & 1) r *= base;
            base *= base;
            k >>= 1;
        }
        return r;
    };
    std::vector<std::vector<Rat>> m(N, std::vector<Rat>(N));
    for (size_t i = 0; i < N; ++i)
        for (size_t j = 0; j < N; ++j)
            m[i][j] = powr(u[i], p.part(j) + static_cast<long long>(N - 1 - j));
    Rat num = det_exact(std::move(m));
    Rat den = 1;
    for (size_t i = 0; i < N; ++i)
        for (size_t j = i + 1; j < N; ++j) den *= (u[i] - u[j]);
    return num / den;
}

// ---------------------------------------------------------------------------
// Weyl dimension formula at all-ones (Eq. (wf)).
// ---------------------------------------------------------------------------

inline Rat schur_weyl_ones(const Partition& p, size_t m) {
    if (p.length() != m) throw std::invalid_argument("schur_weyl_ones: length mismatch");
    Rat r = 1;
    for (size_t i = 0; i < m; ++i)
        for (size_t j = i + 1; j < m; ++j) {
            long long ii = static_cast<long long>(i), jj = static_cast<long long>(j);
            r *= Rat(p.part(i) - p.part(j) + jj - ii, jj - ii);
        }
    return r;
}

inline Rat schur_exact(const Partition& p, const std::vector<Rat>& u);

// ---------------------------------------------------------------------------
// Vanishing-variable reductions (Lemmas 3.1-3.3). With b zeros among the N
// slots and a = #zero parts: a < b forces 0; otherwise the zero slots drop and
// the partition truncates to its first N-b parts; if the surviving variables
// are all equal to x this becomes x^{|lambda|} * Weyl.
// ---------------------------------------------------------------------------

inline Rat schur_with_zeros(const Partition& p, const std::vector<Rat>& u, size_t b) {
    size_t N = p.length();
    if (u.size() != N) throw std::invalid_argument("schur_with_zeros: |u| != length(p)");
    if (b > N) throw std::invalid_argument("schur_with_zeros: b > N");
    size_t bz = 0;
    std::vector<Rat> nz;
    for (auto& v : u)
        if (v == 0) ++bz; else nz.push_back(v);
    if (bz != b) throw std::invalid_argument("schur_with_zeros: zero count mismatch");
    if (p.zero_parts() < b) return Rat(0); // Lemma 3.1
    Partition trunc(std::vector<long long>(p.parts.begin(),
                                           p.parts.begin() + static_cast<long long>(N - b)));
    if (nz.empty()) return Rat(1);
    bool allEqual = std::all_of(nz.begin(), nz.end(), [&](const Rat& v) { return v == nz[0]; });
    if (allEqual) {
        Rat r = schur_weyl_ones(trunc, trunc.length());
        Rat xs = 1;
        for (long long k = 0; k < trunc.size(); ++k) xs *= nz[0];
        return xs * r; // Lemma 3.3
    }
    bool allDistinct = true;
    for (size_t i = 0; i < nz.size() && allDistinct; ++i)
        for (size_t j = i + 1; j < nz.size(); ++j)
            if (nz[i] == nz[j]) { allDistinct = false; break; }
    if (allDistinct) return schur_bialternant(trunc, nz);
    // mixed repeated values: fall through to the branching evaluation below
    return schur_exact(trunc, nz);
}

// ---------------------------------------------------------------------------
// General exact evaluation for arbitrary rational u (zeros and repeats
// allowed): strips zeros via the lemmas above, then uses closed forms when it
// can and the single-variable branching recursion otherwise.
// ---------------------------------------------------------------------------

namespace detail {

struct BranchMemo {
    std::map<std::pair<size_t, std::vector<long long>>, Rat> memo;
};

inline Rat schur_branch(const std::vector<long long>& lam, const std::vector<Rat>& u,
                        size_t k, BranchMemo& mm) {
    // s_lambda(u_0..u_{k-1}), lam has exactly k parts
    if (k == 0) return Rat(1);
    auto key = std::make_pair(k, lam);
    auto it = mm.memo.find(key);
    if (it != mm.memo.end()) return it->second;
    Rat acc = 0;
    if (k == 1) {
        acc = 1;
        for (long long t = 0; t < lam[0]; ++t) acc *= u[0];
    } else {
        // branch over mu < lam (mu_i in [lam_{i+1}, lam_i], k-1 parts);
        // weight u_{k-1}^{|lam|-|mu|}, and |lam|-|mu| includes the whole
        // bottom part lam_{k-1} on top of the per-part drops.
        std::vector<long long> mu(k - 1);
        std::function<void(size_t, long long)> rec = [&](size_t i, long long dropped) {
            if (i == k - 1) {
                Rat w = 1;
                for (long long t = 0; t < dropped + lam[k - 1]; ++t) w *= u[k - 1];
                acc += w * schur_branch(mu, u, k - 1, mm);
                return;
            }
            for (long long v = lam[i + 1]; v <= lam[i]; ++v) {
                mu[i] = v;
                rec(i + 1, dropped + (lam[i] - v));
            }
        };
        rec(0, 0);
    }
    mm.memo[key] = acc;
    return acc;
}

} // namespace detail

inline Rat schur_exact(const Partition& p, const std::vector<Rat>& u) {
    size_t N = p.length();
    if (u.size() != N) throw std::invalid_argument("schur_exact: |u| != length(p)");
    if (N == 0) return Rat(1);
    size_t b = 0;
    for (auto& v : u)
        if (v == 0) ++b;
    if (b > 0) {
        if (p.zero_parts() < b) return Rat(0);
        std::vector<Rat> nz;
        for (auto& v : u)
            if (v != 0) nz.push_back(v);
        Partition trunc(std::vector<long long>(p.parts.begin(),
                                               p.parts.begin() + static_cast<long long>(N - b)));
        return schur_exact(trunc, nz);
    }
    bool allEqual = std::all_of(u.begin(), u.end(), [&](const Rat& v) { return v == u[0]; });
    if (allEqual) {
        Rat r = schur_weyl_ones(p, N);
        Rat xs = 1;
        for (long long k = 0; k < p.size(); ++k) xs *= u[0];
        return xs * r;
    }
    bool allDistinct = true;
    for (size_t i = 0; i < N && allDistinct; ++i)
        for (size_t j = i + 1; j < N; ++j)
            if (u[i] == u[j]) { allDistinct = false; break; }
    if (allDistinct) return schur_bialternant(p, u);
    detail::BranchMemo mm;
    return detail::schur_branch(p.parts, u, N, mm);
}

// Log-domain evaluation for the equal-variable case used by the large-N
// sampler: log s_lambda(x,...,x) = |lambda| log x + sum log Weyl factors.
inline double log_schur_equal(const Partition& p, double x) {
    size_t m = p.length();
    double acc = static_cast<double>(p.size()) * std::log(x);
    for (size_t i = 0; i < m; ++i)
        for (size_t j = i + 1; j < m; ++j) {
            long long ii = static_cast<long long>(i), jj = static_cast<long long>(j);
            acc += std::log(static_cast<double>(p.part(i) - p.part(j) + jj - ii)) -
                   std::log(static_cast<double>(jj - ii));
        }
    return acc;
}

} // namespace shdimer
