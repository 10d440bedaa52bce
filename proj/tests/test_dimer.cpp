#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shdimer/dimer.hpp"
#include "shdimer/rng.hpp"
#include "shdimer/schur.hpp"

using namespace shdimer;

namespace {

// the 3-row worked example: N = 3, Omega = (1,3,6), one free y-row (layer 2)
LatticeSpec hex3_spec(Rat x1, Rat x2, Rat x3, Rat y2) {
    LatticeSpec spec;
    spec.n = 3;
    spec.a = {1, 0, 1};
    spec.x = {x1, x2, x3};
    spec.y = {Rat(1), y2, Rat(1)};
    spec.N = 3;
    spec.Omega = {1, 3, 6};
    return spec;
}

// s_(3,1,0)(x1,x2,x3) written out monomial by monomial (12 terms)
Rat s310(Rat a, Rat b, Rat c) {
    Rat cube = a * a * a * b + a * a * a * c + b * b * b * a + b * b * b * c + c * c * c * a +
               c * c * c * b;
    Rat square = a * a * b * b + a * a * c * c + b * b * c * c;
    Rat mixed = 2 * (a * a * b * c + a * b * b * c + a * b * c * c);
    return cube + square + mixed;
}

LatticeSpec random_spec(SplitRng& rng, size_t maxN = 3, bool allowZeroX = true) {
    LatticeSpec spec;
    spec.n = 1 + rng.next_below(3);
    for (size_t i = 0; i < spec.n; ++i) {
        spec.a.push_back(i == 0 ? 1 : static_cast<int>(rng.next_below(2)));
        long long num = static_cast<long long>(rng.next_below(allowZeroX ? 4 : 3)) +
                        (allowZeroX ? 0 : 1);
        spec.x.push_back(Rat(num, 1 + static_cast<long long>(rng.next_below(2))));
        spec.y.push_back(Rat(1 + static_cast<long long>(rng.next_below(3)), 2));
    }
    spec.N = 1 + rng.next_below(maxN);
    long long pos = 1;
    for (size_t i = 0; i < spec.N; ++i) {
        spec.Omega.push_back(pos);
        pos += 1 + static_cast<long long>(rng.next_below(3));
    }
    return spec;
}

} // namespace

TEST_CASE("partition function: Schur formula equals enumeration") {
    SplitRng rng(100, 0);
    for (int trial = 0; trial < 30; ++trial) {
        auto spec = random_spec(rng);
        Rat Zs = partition_function_schur(spec);
        Rat Ze = partition_function_enum(build_lattice(spec));
        CHECK(Zs == Ze);
    }
}

TEST_CASE("3-row example: Z = (1 + y2 x3) s_(3,1,0)") {
    SplitRng rng(100, 1);
    for (int trial = 0; trial < 20; ++trial) {
        Rat x1(1 + static_cast<long long>(rng.next_below(4)), 2);
        Rat x2(1 + static_cast<long long>(rng.next_below(4)), 3);
        Rat x3(1 + static_cast<long long>(rng.next_below(4)), 2);
        Rat y2(1 + static_cast<long long>(rng.next_below(4)), 3);
        auto spec = hex3_spec(x1, x2, x3, y2);
        Rat expect = (1 + y2 * x3) * s310(x1, x2, x3);
        CHECK(partition_function_schur(spec) == expect);
        CHECK(partition_function_enum(build_lattice(spec)) == expect);
    }
    // unit weights: 2 * 15 = 30 matchings
    auto unit = hex3_spec(Rat(1), Rat(1), Rat(1), Rat(1));
    CHECK(partition_function_enum(build_lattice(unit)) == 30);
    CHECK(enumerate_matchings(build_lattice(unit)).size() == 30);
}

TEST_CASE("3-row example degenerations at zero x") {
    // x2 = 0, x1 = x3 = x: Z = 3 (1 + y2 x) x^4
    SplitRng rng(100, 2);
    for (int trial = 0; trial < 10; ++trial) {
        Rat x(1 + static_cast<long long>(rng.next_below(4)), 2);
        Rat y2(1 + static_cast<long long>(rng.next_below(4)), 3);
        auto spec = hex3_spec(x, Rat(0), x, y2);
        Rat expect = 3 * (1 + y2 * x) * x * x * x * x;
        CHECK(partition_function_schur(spec) == expect);
        CHECK(partition_function_enum(build_lattice(spec)) == expect);
    }
    // x2 = x3 = 0: no matchings at all
    auto dead = hex3_spec(Rat(1), Rat(0), Rat(0), Rat(1));
    CHECK(partition_function_schur(dead) == 0);
    CHECK(enumerate_matchings(build_lattice(dead)).empty());
}

TEST_CASE("matching <-> interlacing sequence is a weight-preserving bijection") {
    SplitRng rng(100, 3);
    for (int trial = 0; trial < 15; ++trial) {
        auto spec = random_spec(rng);
        auto lat = build_lattice(spec);
        auto matchings = enumerate_matchings(lat);
        std::set<std::string> chains;
        for (auto& m : matchings) {
            auto seq = matching_to_sequence(m, lat);
            // chain has 2N+1 partitions, starts at omega, ends empty
            REQUIRE(seq.chain.size() == 2 * spec.N + 1);
            CHECK(seq.chain.front() == boundary_partition(spec.Omega));
            CHECK(seq.chain.back().size() == 0);
            // interlacing pattern: vertical strip up white->black, horizontal
            // strip down black->white
            for (size_t i = 0; i + 1 < seq.chain.size(); ++i) {
                if (i % 2 == 0) CHECK(co_interlaces(seq.chain[i], seq.chain[i + 1]));
                else CHECK(interlaces(seq.chain[i + 1], seq.chain[i]));
            }
            // the chain determines the matching
            auto back = sequence_to_matching(seq, lat);
            CHECK(matching_weight(back) == matching_weight(m));
            std::string key;
            for (auto& p : seq.chain) key += p.str() + "|";
            CHECK(chains.insert(key).second); // distinct matchings -> distinct chains
        }
    }
}

TEST_CASE("sequence weight equals matched edge weight") {
    // |nu - mu| boxes at the layer's y weight, |nu - mu'| boxes at its x weight
    SplitRng rng(100, 4);
    for (int trial = 0; trial < 10; ++trial) {
        auto spec = random_spec(rng);
        auto lat = build_lattice(spec);
        for (auto& m : enumerate_matchings(lat)) {
            auto seq = matching_to_sequence(m, lat);
            Rat w = 1;
            for (size_t i = 0; i + 1 < seq.chain.size(); ++i) {
                size_t layer = i / 2 + 1;
                long long boxes = i % 2 == 0
                                      ? seq.chain[i + 1].size() - seq.chain[i].size()
                                      : seq.chain[i].size() - seq.chain[i + 1].size();
                Rat base = i % 2 == 0 ? spec.y_at(layer == 1 ? 1 : layer - 1) : spec.x_at(layer);
                if (i % 2 == 0 && (layer == 1 || spec.a_at(layer - 1) == 1)) {
                    CHECK(boxes == 0); // frozen layers add no boxes
                    continue;
                }
                for (long long b = 0; b < boxes; ++b) w *= base;
            }
            CHECK(w == matching_weight(m));
        }
    }
}

TEST_CASE("enumeration guard rejects oversized lattices") {
    LatticeSpec spec;
    spec.n = 1;
    spec.a = {1};
    spec.x = {Rat(1)};
    spec.y = {Rat(1)};
    spec.N = 8;
    for (long long i = 0; i < 8; ++i) spec.Omega.push_back(1 + 3 * i);
    CHECK_THROWS(partition_function_enum(build_lattice(spec), 10));
}

TEST_CASE("empirical counting measure aggregates a level across samples") {
    auto spec = hex3_spec(Rat(1), Rat(1), Rat(1), Rat(1));
    auto lat = build_lattice(spec);
    auto matchings = enumerate_matchings(lat);
    std::vector<BoltzmannSample> samples;
    for (auto& m : matchings) {
        BoltzmannSample s;
        s.sequence = matching_to_sequence(m, lat);
        samples.push_back(std::move(s));
    }
    auto meas = empirical_counting_measure(samples, 0);
    CHECK(meas.total_mass() == 1);
    // level 0 is deterministic: atoms exactly at the omega staircase
    auto ref = counting_measure(boundary_partition(spec.Omega));
    REQUIRE(meas.atoms.size() == ref.atoms.size());
    for (size_t i = 0; i < ref.atoms.size(); ++i)
        CHECK(meas.atoms[i].first == ref.atoms[i].first);
}
