#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "shdimer/components.hpp"

using namespace shdimer;

namespace {

// five-block boundary with two weight classes: the worked disconnected example
BlockBoundary example_blocks() {
    BlockBoundary b;
    b.s = 5;
    b.blockFrac = {Rat(1, 6), Rat(1, 6), Rat(1, 6), Rat(1, 4), Rat(1, 4)};
    b.mu = {Rat(6), Rat(5), Rat(2), Rat(1), Rat(0)};
    return b;
}

WeightProfile example_weights() {
    WeightProfile w;
    w.n = 2;
    w.yValues = {Rat(1), Rat(2)};
    w.x = Rat(1);
    return w;
}

// printed closed forms for the two component ratios, r = (6,5,2,1)
Rat psi1_printed(const Rat& t) {
    return ((t - Rat(27, 2)) * (t - 11)) / ((t - 14) * (t - Rat(23, 2)));
}

Rat psi2_printed(const Rat& t) {
    return (t * (t - Rat(7, 3)) * (t - Rat(14, 3))) /
           ((t - Rat(1, 3)) * (t - Rat(8, 3)) * (t - 5));
}

} // namespace

TEST_CASE("block boundary validation") {
    auto b = example_blocks();
    CHECK_NOTHROW(b.validate());
    auto bad = b;
    bad.blockFrac[0] = Rat(1, 3);
    CHECK_THROWS(bad.validate()); // fractions must sum to 1
    bad = b;
    bad.mu[1] = Rat(6);
    CHECK_THROWS(bad.validate()); // mu must strictly decrease
}

TEST_CASE("component parameters reproduce the printed Psi ratios exactly") {
    auto fam = component_params(example_blocks(), 2);
    REQUIRE(fam.n == 2);
    CHECK(fam.D(1) == 1);
    CHECK(fam.D(2) == 2);
    // rational-function equality at more points than the degrees allow
    for (long long k = 0; k < 12; ++k) {
        Rat t(2 * k + 1, 7); // avoids every pole
        CHECK(psi_exact(fam, 1, t + 8) == psi1_printed(t + 8));
        CHECK(psi_exact(fam, 2, t) == psi2_printed(t));
    }
}

TEST_CASE("component J functions match the printed partial fractions") {
    auto fam = component_params(example_blocks(), 2);
    auto cs = example_weights().cs(); // {1, 1/2}
    for (long long k = 0; k < 10; ++k) {
        Rat t1 = Rat(2 * k + 1, 5) + 8;
        Rat psi1 = psi_exact(fam, 1, t1);
        Rat expect1 = Rat(1) / (psi1 - 1) + Rat(1) / (psi1 + 1) + Rat(1) / (2 * psi1 + 1);
        CHECK(j_exact(fam, 1, t1, cs) == expect1);
        Rat t2 = Rat(2 * k + 1, 5);
        Rat psi2 = psi_exact(fam, 2, t2);
        Rat expect2 = Rat(1) / (psi2 - 1) + 1;
        CHECK(j_exact(fam, 2, t2, cs) == expect2);
    }
}

TEST_CASE("component support intervals are pairwise disjoint") {
    auto fam = component_params(example_blocks(), 2);
    CHECK(fam.supportsDisjoint);
    std::vector<std::pair<Rat, Rat>> ivs;
    for (size_t i = 0; i < 2; ++i)
        for (size_t k = 0; k < fam.beta[i].size(); ++k)
            ivs.push_back({fam.beta[i][k], fam.gam[i][k]});
    std::sort(ivs.begin(), ivs.end());
    for (auto& [lo, hi] : ivs) CHECK(lo < hi);
    for (size_t i = 0; i + 1 < ivs.size(); ++i) CHECK(ivs[i].second < ivs[i + 1].first);
}

TEST_CASE("cut condition violations are rejected") {
    // cumulative fractions {1/3, 2/3, 1} miss the n = 2 cut at 1/2
    BlockBoundary b;
    b.s = 3;
    b.blockFrac = {Rat(1, 3), Rat(1, 3), Rat(1, 3)};
    b.mu = {Rat(2), Rat(1), Rat(0)};
    CHECK_THROWS(component_params(b, 2));
}

TEST_CASE("curves stay inside disjoint bounding regions") {
    auto fam = component_params(example_blocks(), 2);
    auto cc = component_curves(fam, example_weights());
    REQUIRE(cc.curves.size() == 2);
    CHECK(cc.regionsDisjoint);
    for (auto& curve : cc.curves) {
        CHECK(curve.samples.size() > 100);
        for (auto& s : curve.samples) {
            CHECK(s.kappa > -1e-9);
            CHECK(s.kappa < 1 + 1e-9);
        }
    }
    // minimum pairwise distance between the two curves is positive
    double minDist = 1e9;
    for (auto& a : cc.curves[0].samples)
        for (auto& b : cc.curves[1].samples) {
            double d = std::hypot(a.chi - b.chi, a.kappa - b.kappa);
            minDist = std::min(minDist, d);
        }
    CHECK(minDist > 0.01);
}

TEST_CASE("single weight class reduces to one staircase component") {
    BlockBoundary b;
    b.s = 2;
    b.blockFrac = {Rat(1, 2), Rat(1, 2)};
    b.mu = {Rat(1), Rat(0)};
    auto fam = component_params(b, 1);
    REQUIRE(fam.n == 1);
    std::vector<std::pair<Rat, Rat>> ivs;
    for (size_t k = 0; k < fam.beta[0].size(); ++k)
        ivs.push_back({fam.beta[0][k], fam.gam[0][k]});
    std::sort(ivs.begin(), ivs.end());
    // counting-measure staircase of (1^{N/2}, 0^{N/2}): [0,1/2] and [3/2,2]
    REQUIRE(ivs.size() == 2);
    CHECK(ivs[0] == std::pair<Rat, Rat>{Rat(0), Rat(1, 2)});
    CHECK(ivs[1] == std::pair<Rat, Rat>{Rat(3, 2), Rat(2)});
}
