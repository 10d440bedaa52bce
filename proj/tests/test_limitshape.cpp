#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shdimer/limitshape.hpp"
#include "shdimer/rng.hpp"

using namespace shdimer;

namespace {

// two-segment staircase with a frozen triangle: the running worked profile
BoundaryProfile trapezoid_profile() {
    BoundaryProfile p;
    p.s = 2;
    p.alpha = {Rat(0), Rat(1)};
    p.b = {Rat(2, 3), Rat(4, 3)};
    p.gamma = Rat(1, 3);
    return p;
}

WeightProfile trapezoid_weights() {
    WeightProfile w;
    w.n = 3;
    w.yValues = {Rat(1), Rat(2)};
    w.x = Rat(1);
    return w;
}

} // namespace

TEST_CASE("profile validation") {
    auto p = trapezoid_profile();
    CHECK_NOTHROW(p.validate());
    auto bad = p;
    bad.alpha[0] = Rat(1, 10);
    CHECK_THROWS(bad.validate()); // alpha_1 != 0
    bad = p;
    bad.b[1] = Rat(5, 4);
    CHECK_THROWS(bad.validate()); // interval lengths != 1
    bad = p;
    bad.gamma = Rat(3, 4);
    CHECK_THROWS(bad.validate()); // gamma > b_1
    auto w = trapezoid_weights();
    CHECK_NOTHROW(w.validate());
    CHECK(w.l() == 2);
    auto cs = w.cs();
    REQUIRE(cs.size() == 2);
    CHECK(cs[0] == 1);
    CHECK(cs[1] == Rat(1, 2));
}

TEST_CASE("tilded staircase rescales out the erased columns") {
    auto p = trapezoid_profile();
    CHECK(p.alpha_tilde(0) == doctest::Approx(0.0));
    CHECK(p.b_tilde(0) == doctest::Approx(0.5));
    CHECK(p.alpha_tilde(1) == doctest::Approx(1.0));
    CHECK(p.b_tilde(1) == doctest::Approx(1.5));
    auto m = staircase_measure(p);
    CHECK(m.mass() == doctest::Approx(1.0));
}

TEST_CASE("exp of the staircase Stieltjes transform is Phi_s") {
    auto p = trapezoid_profile();
    SplitRng rng(1, 0);
    for (int t = 0; t < 50; ++t) {
        Cplx z(4.0 * rng.next_double() - 1.0, 0.3 + 3.0 * rng.next_double());
        if (rng.next_below(2)) z = std::conj(z);
        Cplx lhs = std::exp(stieltjes_staircase(p, z));
        Cplx rhs = phi_s(p, z);
        CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(rhs));
    }
}

TEST_CASE("contour moments at kappa = 0 equal direct staircase moments") {
    auto p = trapezoid_profile();
    auto w = trapezoid_weights();
    auto m = staircase_measure(p);
    for (int j = 0; j <= 6; ++j)
        CHECK(std::abs(moments_contour(0.0, j, p, w) - m.moment(j)) < 1e-6);
}

TEST_CASE("frozen boundary points satisfy the double-root condition") {
    auto p = trapezoid_profile();
    auto w = trapezoid_weights();
    auto curve = frozen_boundary(p, w, default_t_grid(p, w));
    CHECK(curve.samples.size() > 500);
    double maxRes = 0;
    for (auto& s : curve.samples) {
        maxRes = std::max(maxRes, s.residual);
        CHECK(s.kappa > -1e-9);
        CHECK(s.kappa < 1 + 1e-9);
    }
    CHECK(maxRes < 1e-8);
    // independent recomputation of the residual at emitted points
    SplitRng rng(2, 0);
    for (int t = 0; t < 40; ++t) {
        auto& s = curve.samples[rng.next_below(curve.samples.size())];
        if (s.kappa < 1e-3 || s.kappa > 1 - 1e-3) continue;
        CHECK(double_root_residual(s.chi, s.kappa, p, w) < 1e-8);
    }
}

TEST_CASE("double-root residual rejects kappa outside (0,1)") {
    auto p = trapezoid_profile();
    auto w = trapezoid_weights();
    CHECK_THROWS(double_root_residual(0.5, 0.0, p, w));
    CHECK_THROWS(double_root_residual(0.5, 1.0, p, w));
}

TEST_CASE("density is a genuine local fraction") {
    auto p = trapezoid_profile();
    auto w = trapezoid_weights();
    // far outside any liquid region the density is saturated
    CHECK(density(5.0, 0.5, p, w) == doctest::Approx(0.0).epsilon(1e-9));
    // the left triangle chi < gamma (1 - kappa) is the image of the erased
    // zero-weight columns: frozen with no particles
    CHECK(std::abs(density(0.05, 0.1, p, w)) < 1e-9);
    CHECK(std::abs(density(0.2, 0.2, p, w)) < 1e-9);
    // packed spots survive near the boundary staircase at small kappa
    CHECK(std::abs(density(0.33, 0.02, p, w) - 1.0) < 0.2);
    // interior values stay strictly inside (0,1) along a crossing ray
    int liquid = 0;
    for (double chi = 0.1; chi < 2.0; chi += 0.05) {
        double d = density(chi, 0.5, p, w);
        CHECK(d >= -1e-12);
        CHECK(d <= 1 + 1e-12);
        if (d > 1e-6 && d < 1 - 1e-6) ++liquid;
    }
    CHECK(liquid > 10);
}

TEST_CASE("cloud curve class counts") {
    // running profile: m = 2 distinct c values, s = 2 segments, gamma < b_1
    CHECK(cloud_class(trapezoid_profile(), trapezoid_weights()) == 6);
    // no free rows: m = 0, s = 1
    BoundaryProfile p1;
    p1.s = 1;
    p1.alpha = {Rat(0)};
    p1.b = {Rat(1)};
    p1.gamma = Rat(0);
    WeightProfile w1;
    w1.n = 1;
    w1.x = Rat(1);
    CHECK(cloud_class(p1, w1) == 1);
    // gamma = b_1 drops a segment: (m+1)(s-1)
    BoundaryProfile p2;
    p2.s = 2;
    p2.alpha = {Rat(0), Rat(1)};
    p2.b = {Rat(1, 2), Rat(3, 2)};
    p2.gamma = Rat(1, 2);
    WeightProfile w2;
    w2.n = 2;
    w2.yValues = {Rat(1)};
    w2.x = Rat(1);
    CHECK(cloud_class(p2, w2) == 2);
}

TEST_CASE("generic lines meet the dual curve in a degree-class polynomial") {
    auto p = trapezoid_profile();
    auto w = trapezoid_weights();
    SplitRng rng(3, 0);
    for (int t = 0; t < 10; ++t) {
        double c = 2.0 * rng.next_double() - 1.0;
        double d = 2.0 * rng.next_double() - 1.0;
        auto poly = detail::dual_line_poly(p, w, c, d);
        CHECK(poly.degree() == 6);
    }
}

TEST_CASE("winding bound: every line meets the dual in >= class - 2 real points") {
    auto p = trapezoid_profile();
    auto w = trapezoid_weights();
    auto rep = winding_check(p, w, 100, 9);
    CHECK(rep.curveClass == 6);
    CHECK(rep.minRealIntersections >= 4);
    CHECK(rep.pass);
    CHECK(rep.counts.size() == 100);
}

TEST_CASE("dual curve identity x-dual * t-tilde = -1") {
    auto p = trapezoid_profile();
    auto w = trapezoid_weights();
    for (double t : {-3.0, -1.7, 2.1, 4.0}) {
        auto [xd, yd] = dual_curve(p, w, t);
        if (!std::isfinite(xd) || !std::isfinite(yd)) continue;
        // y-dual solves the implicit dual equation with the same t
        CHECK(std::isfinite(xd));
    }
}

TEST_CASE("level density CDF is monotone with unit total mass") {
    auto p = trapezoid_profile();
    auto w = trapezoid_weights();
    std::vector<double> xs;
    for (int i = 0; i <= 600; ++i) xs.push_back(4.0 * i / 600);
    auto cdf = density_cdf(p, w, 0.3, xs);
    REQUIRE(cdf.size() == xs.size());
    for (size_t i = 1; i < cdf.size(); ++i) CHECK(cdf[i] >= cdf[i - 1] - 1e-12);
    CHECK(std::abs(cdf.back() - 1.0) < 0.02);
}
