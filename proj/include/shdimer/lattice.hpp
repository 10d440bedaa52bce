#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "common.hpp"
#include "partition.hpp"

namespace shdimer {

enum class WeightRegime {
    General,               // arbitrary nonnegative x (small-N / oracle work)
    ContractingBipartite,  // nonzero x's share one common value (Assumption 2.1(3))
    DistinctX,             // pairwise distinct positive x (Assumption 4.1)
};

struct LatticeSpec {
    size_t n = 0;                 // weight period
    std::vector<int> a;           // n bits
    std::vector<Rat> x;           // n NE-SW weights, rows 2m -> 2m+1
    std::vector<Rat> y;           // n NE-SW weights, rows 2m-1 -> 2m
    size_t N = 0;                 // boundary vertex count
    std::vector<long long> Omega; // strictly increasing, Omega_1 = 1
    WeightRegime regime = WeightRegime::General;

    void validate() const {
        if (n == 0) throw std::invalid_argument("n = 0");
        if (a.size() != n || x.size() != n || y.size() != n)
            throw std::invalid_argument("a/x/y must have length n");
        for (int b : a)
            if (b != 0 && b != 1) throw std::invalid_argument("a entries must be bits");
        for (auto& v : x)
            if (v < 0) throw std::invalid_argument("x entries must be nonnegative");
        for (auto& v : y)
            if (v < 0) throw std::invalid_argument("y entries must be nonnegative");
        if (N == 0 || Omega.size() != N) throw std::invalid_argument("Omega must have length N");
        if (Omega[0] != 1) throw std::invalid_argument("Omega_1 must be 1");
        for (size_t i = 1; i < N; ++i)
            if (Omega[i] <= Omega[i - 1])
                throw std::invalid_argument("Omega must be strictly increasing");
    }

    // periodically extended weights, 1-based layer index
    int a_at(size_t m) const { return a[(m - 1) % n]; }
    const Rat& x_at(size_t m) const { return x[(m - 1) % n]; }
    const Rat& y_at(size_t m) const { return y[(m - 1) % n]; }

    // gamma = |J|/n where J = {j in [n] : x_j = 0}
    Rat gamma() const {
        size_t z = 0;
        for (auto& v : x)
            if (v == 0) ++z;
        return Rat(static_cast<long long>(z), static_cast<long long>(n));
    }
};

// Vertices carry doubled horizontal coordinates so every position is an
// integer; row r sits at height r/2 (odd rows white, even rows black).
struct LatticeVertex {
    long long pos;
    int row;
    bool operator<(const LatticeVertex& o) const {
        return row != o.row ? row < o.row : pos < o.pos;
    }
    bool operator==(const LatticeVertex& o) const { return row == o.row && pos == o.pos; }
};

struct LatticeEdge {
    LatticeVertex lo; // lower row
    LatticeVertex hi; // upper row
    Rat w;
};

struct ContractingLattice {
    LatticeSpec spec;
    int rowCount = 0;                                // realized rows (2N or 2N+1)
    std::map<int, std::pair<long long, long long>> spans; // row -> [L, R]
    std::map<int, std::vector<long long>> rows;      // row -> vertex positions
    std::vector<LatticeEdge> edges;                  // active (positive-weight) edges
    std::vector<LatticeEdge> removedEdges;           // weight-0 edges, excluded above

    size_t vertex_count() const {
        size_t c = 0;
        for (auto& [r, vs] : rows) c += vs.size();
        return c;
    }
};

// omega_j = Omega_{N+1-j} - (N+1-j), j = 1..N
inline Partition boundary_partition(const std::vector<long long>& Omega) {
    size_t N = Omega.size();
    if (N == 0) throw std::invalid_argument("empty Omega");
    for (size_t i = 1; i < N; ++i)
        if (Omega[i] <= Omega[i - 1]) throw std::invalid_argument("Omega not increasing");
    if (Omega[0] < 1) throw std::invalid_argument("Omega entries must be positive");
    std::vector<long long> parts(N);
    for (size_t j = 1; j <= N; ++j)
        parts[j - 1] = Omega[N - j] - static_cast<long long>(N + 1 - j);
    return Partition(std::move(parts));
}

inline std::vector<long long> partition_to_omega(const Partition& p) {
    size_t N = p.length();
    std::vector<long long> Omega(N);
    for (size_t j = 1; j <= N; ++j)
        Omega[N - j] = p.part(j - 1) + static_cast<long long>(N + 1 - j);
    return Omega;
}

// I1 = {k in [N] : a_k = 1} with a extended periodically; I2 its complement.
inline std::pair<std::set<size_t>, std::set<size_t>> i1_i2(const LatticeSpec& spec) {
    std::set<size_t> i1, i2;
    for (size_t k = 1; k <= spec.N; ++k)
        (spec.a_at(k) == 1 ? i1 : i2).insert(k);
    return {i1, i2};
}

// Gamma_i = prod_{t=i+1}^{N} (1 + y_i x_t), Eq. (gi)
inline Rat gamma_factor(const LatticeSpec& spec, size_t i) {
    if (i < 1 || i > spec.N || spec.a_at(i) != 0)
        throw std::invalid_argument("gamma_factor: index not in I2");
    Rat g = 1;
    for (size_t t = i + 1; t <= spec.N; ++t) g *= 1 + spec.y_at(i) * spec.x_at(t);
    return g;
}

// Build the lattice. Rows go 1..2N+1 bottom-up (the top row may be empty,
// leaving 2N rows). Row 1 holds whites at 2*Omega_i - 1 inside the span
// [1, 2*Omega_N - 1]; span positions without a vertex act as boundary holes.
// Layer m (white 2m-1 -> black 2m): m = 1 is always the frozen hexagonal
// shift w -> b_{w+1}; for m >= 2 the layer carries (a, y) at period index
// m-1 (so the y_i edges sit directly above the x_i edges, which is what
// makes the weighted count factor into the Schur-times-Gamma product). a-bar = 1:
// shift, span (+1,+1); a-bar = 0: w -> b_{w+1} weight y and w -> b_{w-1}
// weight 1, span (-1,+1). Layer m (black 2m -> white 2m+1): weight x_m on
// b_{w-1} -> w and 1 on b_{w+1} -> w, span (+1,-1).
inline ContractingLattice build_lattice(const LatticeSpec& spec) {
    spec.validate();
    ContractingLattice lat;
    lat.spec = spec;
    size_t N = spec.N;
    lat.spans[1] = {1, 2 * spec.Omega[N - 1] - 1};
    {
        std::vector<long long> r1;
        for (auto o : spec.Omega) r1.push_back(2 * o - 1);
        lat.rows[1] = std::move(r1);
    }
    lat.rowCount = 1;
    auto pushEdge = [&](LatticeVertex lo, LatticeVertex hi, const Rat& w) {
        if (w == 0)
            lat.removedEdges.push_back({lo, hi, w});
        else
            lat.edges.push_back({lo, hi, w});
    };
    for (size_t m = 1; m <= N; ++m) {
        int wr = static_cast<int>(2 * m - 1), br = static_cast<int>(2 * m);
        auto [L, R] = lat.spans[wr];
        int abar = m == 1 ? 1 : spec.a_at(m - 1);
        Rat yv = m == 1 ? Rat(1) : spec.y_at(m - 1);
        long long Lb = abar == 1 ? L + 1 : L - 1, Rb = R + 1;
        lat.spans[br] = {Lb, Rb};
        std::vector<long long> blk;
        for (long long p = Lb; p <= Rb; p += 2) blk.push_back(p);
        std::set<long long> B(blk.begin(), blk.end());
        lat.rows[br] = std::move(blk);
        lat.rowCount = br;
        for (long long w : lat.rows[wr]) {
            if (abar == 1) {
                pushEdge({w, wr}, {w + 1, br}, Rat(1));
            } else {
                if (B.count(w + 1)) pushEdge({w, wr}, {w + 1, br}, yv);
                if (B.count(w - 1)) pushEdge({w, wr}, {w - 1, br}, Rat(1));
            }
        }
        long long Lw = Lb + 1, Rw = Rb - 1;
        if (Lw > Rw) break; // top span empty: 2N rows realized
        int wr2 = br + 1;
        lat.spans[wr2] = {Lw, Rw};
        std::vector<long long> wht;
        for (long long p = Lw; p <= Rw; p += 2) wht.push_back(p);
        lat.rows[wr2] = std::move(wht);
        lat.rowCount = wr2;
        const Rat& xv = spec.x_at(m);
        for (long long w : lat.rows[wr2]) {
            if (B.count(w - 1)) pushEdge({w - 1, static_cast<int>(br)}, {w, wr2}, xv);
            if (B.count(w + 1)) pushEdge({w + 1, static_cast<int>(br)}, {w, wr2}, Rat(1));
        }
    }
    return lat;
}

} // namespace shdimer
