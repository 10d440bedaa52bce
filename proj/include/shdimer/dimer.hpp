#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "lattice.hpp"
#include "partition.hpp"
#include "schur.hpp"

namespace shdimer {

struct PerfectMatching {
    std::vector<LatticeEdge> edges;
};

// chain[c] is the partition read off row c+1 (bottom-up):
// mu^(N), nu^(N), mu^(N-1), nu^(N-1), ..., mu^(0).
// mu^(i) = chain[2(N-i)], nu^(i) = chain[2(N-i)+1]; rows 2k-1 and 2k carry
// N+1-k parts each.
struct MatchingSequence {
    std::vector<Partition> chain;

    const Partition& mu(size_t i, size_t N) const { return chain.at(2 * (N - i)); }
    const Partition& nu(size_t i, size_t N) const { return chain.at(2 * (N - i) + 1); }
};

struct BoltzmannSample {
    MatchingSequence sequence;
    Rat weight;
    double logWeight = 0; // used instead of weight in float mode
    uint64_t rngSeed = 0;
};

inline Rat matching_weight(const PerfectMatching& m) {
    Rat w = 1;
    for (auto& e : m.edges) w *= e.w;
    return w;
}

namespace detail {

// V-positions of a row with span [L,R] holding partition lam with F parts:
// scanning left to right, the j-th V (0-based) sits at span slot
// lam_{F-1-j} + j, i.e. after exactly lam_{F-1-j} holes.
inline std::vector<long long> v_positions(long long L, const Partition& lam) {
    size_t F = lam.length();
    std::vector<long long> pos(F);
    for (size_t j = 0; j < F; ++j)
        pos[j] = L + 2 * (lam.part(F - 1 - j) + static_cast<long long>(j));
    return pos;
}

} // namespace detail

// Read the interlacing chain off a matching (Lemma 2.14): on white rows a
// vertex is V when its matched edge goes up, on black rows when it goes
// down; span positions of row 1 with no vertex count as holes. The k-th V
// from the right records the number of holes strictly to its left.
inline MatchingSequence matching_to_sequence(const PerfectMatching& m,
                                             const ContractingLattice& lat) {
    size_t N = lat.spec.N;
    if (m.edges.size() * 2 != lat.vertex_count())
        throw std::invalid_argument("not a perfect matching: edge count");
    std::map<LatticeVertex, bool> matchedUp;
    for (auto& e : m.edges) {
        if (!matchedUp.emplace(e.lo, true).second || !matchedUp.emplace(e.hi, false).second)
            throw std::invalid_argument("not a perfect matching: repeated vertex");
    }
    MatchingSequence seq;
    for (int r = 1; r <= static_cast<int>(2 * N + 1); ++r) {
        auto it = lat.rows.find(r);
        if (it == lat.rows.end()) {
            seq.chain.push_back(Partition{});
            continue;
        }
        auto [L, R] = lat.spans.at(r);
        std::set<long long> present(it->second.begin(), it->second.end());
        bool white = r % 2 == 1;
        std::vector<long long> lam;
        long long holes = 0;
        for (long long p = L; p <= R; p += 2) {
            if (!present.count(p)) {
                ++holes;
                continue;
            }
            auto mu = matchedUp.find({p, r});
            if (mu == matchedUp.end())
                throw std::invalid_argument("not a perfect matching: uncovered vertex");
            bool isV = white ? mu->second : !mu->second;
            if (isV)
                lam.push_back(holes);
            else
                ++holes;
        }
        std::reverse(lam.begin(), lam.end());
        seq.chain.push_back(Partition(std::move(lam)));
    }
    return seq;
}

inline PerfectMatching sequence_to_matching(const MatchingSequence& s,
                                            const ContractingLattice& lat) {
    size_t N = lat.spec.N;
    if (s.chain.size() != 2 * N + 1)
        throw std::invalid_argument("chain must have 2N+1 partitions");
    // validate the interlacing pattern and the a_m = 1 equality constraint
    for (size_t i = 0; i + 1 < s.chain.size(); ++i) {
        if (i % 2 == 0) {
            if (!co_interlaces(s.chain[i], s.chain[i + 1]))
                throw std::invalid_argument("co-interlacing violated in chain");
        } else {
            if (!interlaces(s.chain[i + 1], s.chain[i]))
                throw std::invalid_argument("interlacing violated in chain");
        }
    }
    if (s.chain[0] != s.chain[1])
        throw std::invalid_argument("frozen bottom layer must leave the partition unchanged");
    for (size_t m = 2; m <= N; ++m)
        if (lat.spec.a_at(m - 1) == 1 && s.chain[2 * m - 2] != s.chain[2 * m - 1])
            throw std::invalid_argument("a=1 layer must leave the partition unchanged");
    if (s.chain[0] != boundary_partition(lat.spec.Omega))
        throw std::invalid_argument("chain must start at the boundary partition");

    std::map<std::pair<LatticeVertex, LatticeVertex>, Rat> weightOf;
    for (auto& e : lat.edges) weightOf[{e.lo, e.hi}] = e.w;
    PerfectMatching pm;
    // per row: V positions; then pair layer by layer (ups of row r in order
    // with downs of row r+1 in order; each pair must be grid-adjacent).
    std::vector<std::vector<long long>> vpos(2 * N + 2);
    for (int r = 1; r <= lat.rowCount; ++r)
        vpos[static_cast<size_t>(r)] =
            detail::v_positions(lat.spans.at(r).first, s.chain[static_cast<size_t>(r - 1)]);
    for (int r = 1; r < lat.rowCount; ++r) {
        bool lowerWhite = r % 2 == 1;
        // matched-up on row r: whites that are V, blacks that are not V
        std::vector<long long> ups, downs;
        {
            std::set<long long> V(vpos[static_cast<size_t>(r)].begin(),
                                  vpos[static_cast<size_t>(r)].end());
            for (long long p : lat.rows.at(r))
                if (V.count(p) == (lowerWhite ? 1u : 0u)) ups.push_back(p);
        }
        {
            std::set<long long> V(vpos[static_cast<size_t>(r + 1)].begin(),
                                  vpos[static_cast<size_t>(r + 1)].end());
            bool upperWhite = !lowerWhite;
            for (long long p : lat.rows.at(r + 1))
                if (V.count(p) == (upperWhite ? 0u : 1u)) downs.push_back(p);
        }
        if (ups.size() != downs.size())
            throw std::invalid_argument("chain does not define a matching (layer imbalance)");
        for (size_t i = 0; i < ups.size(); ++i) {
            LatticeVertex lo{ups[i], r}, hi{downs[i], r + 1};
            if (std::abs(lo.pos - hi.pos) != 1)
                throw std::invalid_argument("chain pairs non-adjacent vertices");
            auto it = weightOf.find({lo, hi});
            if (it == weightOf.end())
                throw std::invalid_argument("chain uses a removed or absent edge");
            pm.edges.push_back({lo, hi, it->second});
        }
    }
    return pm;
}

inline std::vector<PerfectMatching> enumerate_matchings(const ContractingLattice& lat,
                                                        size_t vertexGuard = 60) {
    size_t V = lat.vertex_count();
    if (V > vertexGuard) throw std::runtime_error("enumerate_matchings: size guard exceeded");
    std::vector<LatticeVertex> verts;
    for (auto& [r, vs] : lat.rows)
        for (long long p : vs) verts.push_back({p, r});
    std::sort(verts.begin(), verts.end());
    std::map<LatticeVertex, std::vector<size_t>> adj;
    for (size_t i = 0; i < lat.edges.size(); ++i) {
        adj[lat.edges[i].lo].push_back(i);
        adj[lat.edges[i].hi].push_back(i);
    }
    for (auto& v : verts)
        if (!adj.count(v)) return {}; // isolated vertex: no matching
    std::vector<PerfectMatching> out;
    std::set<LatticeVertex> used;
    std::vector<size_t> chosen;
    std::function<void(size_t)> rec = [&](size_t k) {
        while (k < verts.size() && used.count(verts[k])) ++k;
        if (k == verts.size()) {
            PerfectMatching pm;
            for (size_t ei : chosen) pm.edges.push_back(lat.edges[ei]);
            out.push_back(std::move(pm));
            return;
        }
        const LatticeVertex& v = verts[k];
        for (size_t ei : adj[v]) {
            const auto& e = lat.edges[ei];
            LatticeVertex o = e.lo == v ? e.hi : e.lo;
            if (used.count(o)) continue;
            used.insert(v);
            used.insert(o);
            chosen.push_back(ei);
            rec(k + 1);
            chosen.pop_back();
            used.erase(v);
            used.erase(o);
        }
    };
    rec(0);
    return out;
}

// Z = [prod_{i in I2 cap [N]} Gamma_i] * s_omega(x_1..x_N).
inline Rat partition_function_schur(const LatticeSpec& spec) {
    spec.validate();
    Rat Z = 1;
    for (size_t i = 1; i <= spec.N; ++i)
        if (spec.a_at(i) == 0) Z *= gamma_factor(spec, i);
    std::vector<Rat> xs(spec.N);
    for (size_t t = 1; t <= spec.N; ++t) xs[t - 1] = spec.x_at(t);
    Partition omega = boundary_partition(spec.Omega);
    return Z * schur_exact(omega, xs);
}

inline Rat partition_function_enum(const ContractingLattice& lat, size_t vertexGuard = 60) {
    Rat Z = 0;
    for (auto& m : enumerate_matchings(lat, vertexGuard)) Z += matching_weight(m);
    return Z;
}

// Average of counting_measure over the chain entry at `level` (0-based index
// into the chain, i.e. row level+1). Zero-length partitions contribute a
// single atom at 0.
inline CountingMeasure empirical_counting_measure(const std::vector<BoltzmannSample>& samples,
                                                  size_t level) {
    if (samples.empty()) throw std::invalid_argument("no samples");
    std::map<Rat, Rat> pooled;
    Rat per(1, static_cast<long long>(samples.size()));
    for (auto& s : samples) {
        if (level >= s.sequence.chain.size()) throw std::invalid_argument("invalid level");
        const Partition& p = s.sequence.chain[level];
        if (p.length() == 0) {
            pooled[Rat(0)] += per;
            continue;
        }
        for (auto& [pos, mass] : counting_measure(p).atoms) pooled[pos] += per * mass;
    }
    CountingMeasure m;
    for (auto it = pooled.rbegin(); it != pooled.rend(); ++it)
        m.atoms.push_back({it->first, it->second});
    return m;
}

} // namespace shdimer
