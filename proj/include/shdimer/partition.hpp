#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "common.hpp"

namespace shdimer {

// Weakly decreasing nonnegative integers; trailing zeros are significant
// (a partition of length N may end in zero parts).
struct Partition {
    std::vector<long long> parts;

    Partition() = default;
    explicit Partition(std::vector<long long> p) : parts(std::move(p)) {
        for (size_t i = 0; i < parts.size(); ++i) {
            if (parts[i] < 0) throw std::invalid_argument("negative part");
            if (i > 0 && parts[i] > parts[i - 1])
                throw std::invalid_argument("parts not weakly decreasing");
        }
    }

    size_t length() const { return parts.size(); }
    long long size() const {
        return std::accumulate(parts.begin(), parts.end(), 0LL);
    }
    long long part(size_t i) const { return i < parts.size() ? parts[i] : 0; }
    size_t zero_parts() const {
        size_t z = 0;
        for (auto p : parts)
            if (p == 0) ++z;
        return z;
    }
    bool operator==(const Partition& o) const { return parts == o.parts; }
    bool operator!=(const Partition& o) const { return parts != o.parts; }
    bool operator<(const Partition& o) const { return parts < o.parts; }

    std::string str() const {
        std::string s;
        for (size_t i = 0; i < parts.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(parts[i]);
        }
        return s;
    }
};

// lambda < mu: mu_i >= lambda_i >= mu_{i+1} (horizontal-strip containment;
// missing parts are 0).
inline bool interlaces(const Partition& lower, const Partition& upper) {
    size_t n = std::max(lower.length(), upper.length());
    for (size_t i = 0; i < n; ++i) {
        if (lower.part(i) > upper.part(i)) return false;
        if (i + 1 < n && upper.part(i + 1) > lower.part(i)) return false;
    }
    return true;
}

inline Partition conjugate(const Partition& p) {
    std::vector<long long> c;
    if (!p.parts.empty() && p.parts[0] > 0) {
        c.resize(static_cast<size_t>(p.parts[0]), 0);
        for (auto part : p.parts)
            for (long long j = 0; j < part; ++j) ++c[static_cast<size_t>(j)];
    }
    return Partition(std::move(c));
}

// lambda <' mu: conjugates interlace, i.e. mu/lambda is a vertical strip
// (each part grows by at most 1).
inline bool co_interlaces(const Partition& lower, const Partition& upper) {
    size_t n = std::max(lower.length(), upper.length());
    for (size_t i = 0; i < n; ++i) {
        long long lo = lower.part(i), up = upper.part(i);
        if (up < lo || up > lo + 1) return false;
    }
    return true;
}

struct CountingMeasure {
    // positions strictly decreasing, masses positive summing to 1
    std::vector<std::pair<Rat, Rat>> atoms;

    Rat total_mass() const {
        Rat m = 0;
        for (auto& a : atoms) m += a.second;
        return m;
    }
};

// m(lambda) = (1/N) sum_i delta((lambda_i + N - i)/N), i = 1..N.
inline CountingMeasure counting_measure(const Partition& p) {
    if (p.parts.empty()) throw std::invalid_argument("counting_measure of empty partition");
    long long N = static_cast<long long>(p.length());
    CountingMeasure m;
    for (long long i = 1; i <= N; ++i) {
        m.atoms.push_back({Rat(p.part(static_cast<size_t>(i - 1)) + N - i, N), Rat(1, N)});
    }
    return m;
}

struct SplitPartitionFamily {
    std::vector<Partition> components;   // indexed by weight class 0..n-1
    std::vector<int> permutation;        // sigma as 0-based images
    std::vector<long long> eta;          // eta_j^sigma, j = 0..N-1
};

// Split of lambda along weight classes:
// eta_j = |{k > j : x_{sigma(k)} != x_{sigma(j)}}|, and class i collects
// lambda_j + eta_j over j with x_{sigma(j)} = value_i, sorted decreasing.
// Requires the class values to be pairwise distinct (weights[j] gives the
// class value attached to slot sigma(j)).
inline SplitPartitionFamily split_partition(const Partition& p,
                                            const std::vector<Rat>& weights,
                                            const std::vector<int>& sigma) {
    size_t N = p.length();
    if (weights.size() != N) throw std::invalid_argument("weights length mismatch");
    if (sigma.size() != N) throw std::invalid_argument("sigma length mismatch");
    std::vector<bool> seen(N, false);
    for (int s : sigma) {
        if (s < 0 || static_cast<size_t>(s) >= N || seen[static_cast<size_t>(s)])
            throw std::invalid_argument("sigma is not a permutation");
        seen[static_cast<size_t>(s)] = true;
    }
    SplitPartitionFamily fam;
    fam.permutation = sigma;
    fam.eta.resize(N, 0);
    std::vector<Rat> val(N);
    for (size_t j = 0; j < N; ++j) val[j] = weights[static_cast<size_t>(sigma[j])];
    for (size_t j = 0; j < N; ++j)
        for (size_t k = j + 1; k < N; ++k)
            if (val[k] != val[j]) ++fam.eta[j];
    // distinct class values in order of first appearance of the sorted distinct set
    std::vector<Rat> classes;
    for (size_t j = 0; j < N; ++j)
        if (std::find(classes.begin(), classes.end(), val[j]) == classes.end())
            classes.push_back(val[j]);
    for (auto& cv : classes) {
        std::vector<long long> comp;
        for (size_t j = 0; j < N; ++j)
            if (val[j] == cv) comp.push_back(p.part(j) + fam.eta[j]);
        std::sort(comp.begin(), comp.end(), std::greater<>());
        fam.components.push_back(Partition(std::move(comp)));
    }
    return fam;
}

} // namespace shdimer
