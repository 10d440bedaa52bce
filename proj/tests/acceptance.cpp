// End-to-end acceptance checks: one pass/fail line per criterion, exit 1 on
// any failure. Each criterion cross-validates a different pair of pipelines
// (exact combinatorics, Monte Carlo, analytic limit shape).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "shdimer/components.hpp"
#include "shdimer/dimer.hpp"
#include "shdimer/levelsampler.hpp"
#include "shdimer/limitshape.hpp"
#include "shdimer/rng.hpp"
#include "shdimer/sampler.hpp"
#include "shdimer/schur.hpp"

using namespace shdimer;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail, double seconds) {
    std::printf("criterion %d: %s (%s, %.1fs)\n", criterion, pass ? "PASS" : "FAIL",
                detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++failures;
}

double now() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

LatticeSpec random_spec(SplitRng& rng, size_t maxN) {
    LatticeSpec spec;
    spec.n = 1 + rng.next_below(3);
    for (size_t i = 0; i < spec.n; ++i) {
        spec.a.push_back(i == 0 ? 1 : static_cast<int>(rng.next_below(2)));
        spec.x.push_back(Rat(static_cast<long long>(rng.next_below(4)),
                             1 + static_cast<long long>(rng.next_below(2))));
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

// two-segment staircase with one frozen triangle: the running limit profile
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

// finite-size counterpart of the trapezoid profile at N = 60
LatticeSpec trapezoid_spec60() {
    LatticeSpec spec;
    spec.n = 3;
    spec.a = {1, 0, 0};
    spec.x = {Rat(1), Rat(1), Rat(0)};
    spec.y = {Rat(0), Rat(1), Rat(2)};
    spec.N = 60;
    for (long long i = 1; i <= 40; ++i) spec.Omega.push_back(i);
    for (long long i = 61; i <= 80; ++i) spec.Omega.push_back(i);
    return spec;
}

void criterion1() {
    double t0 = now();
    int checked = 0, zeroX = 0;
    bool ok = true;
    SplitRng rng(501, 0);
    while (checked < 50 || zeroX < 5) {
        auto spec = random_spec(rng, 4);
        bool hasZero = std::any_of(spec.x.begin(), spec.x.end(),
                                   [](const Rat& v) { return v == 0; });
        Rat Zs = partition_function_schur(spec);
        Rat Ze = partition_function_enum(build_lattice(spec), 200);
        if (Zs != Ze) ok = false;
        ++checked;
        if (hasZero) ++zeroX;
        if (checked > 200) break;
    }
    report(1, ok && checked >= 50 && zeroX >= 5,
           std::to_string(checked) + " random specs exact, " + std::to_string(zeroX) +
               " with zero x",
           now() - t0);
}

void criterion2() {
    double t0 = now();
    bool ok = true;
    SplitRng rng(502, 0);
    for (int trial = 0; trial < 20; ++trial) {
        Rat x1(1 + static_cast<long long>(rng.next_below(4)), 2);
        Rat x2(1 + static_cast<long long>(rng.next_below(4)), 3);
        Rat x3(1 + static_cast<long long>(rng.next_below(4)), 2);
        Rat y2(1 + static_cast<long long>(rng.next_below(4)), 3);
        Rat expect = (1 + y2 * x3) * s310(x1, x2, x3);
        auto spec = hex3_spec(x1, x2, x3, y2);
        ok = ok && partition_function_schur(spec) == expect &&
             partition_function_enum(build_lattice(spec)) == expect;
        // degeneration x2 = 0, x1 = x3 = x: only three tableaux survive
        auto degen = hex3_spec(x1, Rat(0), x1, y2);
        ok = ok && partition_function_schur(degen) == 3 * (1 + y2 * x1) * x1 * x1 * x1 * x1;
    }
    auto unit = hex3_spec(Rat(1), Rat(1), Rat(1), Rat(1));
    ok = ok && partition_function_enum(build_lattice(unit)) == 30;
    auto dead = hex3_spec(Rat(1), Rat(0), Rat(0), Rat(1));
    ok = ok && partition_function_schur(dead) == 0 &&
         enumerate_matchings(build_lattice(dead)).empty();
    report(2, ok, "Z = (1+y2 x3) s_(3,1,0) with degenerations", now() - t0);
}

void criterion3() {
    double t0 = now();
    auto spec = hex3_spec(Rat(1), Rat(1, 2), Rat(2), Rat(3, 2));
    auto lat = build_lattice(spec);
    std::map<std::string, Rat> mass;
    Rat Z = 0;
    auto key = [](const MatchingSequence& seq) {
        std::string k;
        for (auto& p : seq.chain) k += p.str() + "|";
        return k;
    };
    for (auto& m : enumerate_matchings(lat)) {
        Rat w = matching_weight(m);
        mass[key(matching_to_sequence(m, lat))] += w;
        Z += w;
    }
    ExactSampler sampler(spec);
    const long draws = 100000;
    std::map<std::string, long> counts;
    for (long i = 0; i < draws; ++i)
        counts[key(sampler.sample(503, static_cast<uint64_t>(i)).sequence)]++;
    long covered = 0;
    double worst = 0;
    for (auto& [k, v] : mass) {
        double pr = to_double(v / Z);
        auto it = counts.find(k);
        long c = it == counts.end() ? 0 : it->second;
        covered += c;
        double sigma = std::sqrt(pr * (1 - pr) / static_cast<double>(draws));
        worst = std::max(worst, std::fabs(static_cast<double>(c) / draws - pr) / sigma);
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "worst deviation %.2f sigma over %zu matchings",
                  worst, mass.size());
    report(3, covered == draws && worst < 4.0, detail, now() - t0);
}

void criterion4() {
    double t0 = now();
    auto p = trapezoid_profile();
    auto w = trapezoid_weights();
    auto curve = frozen_boundary(p, w, default_t_grid(p, w));
    bool ok = curve.samples.size() > 500;
    double maxRes = 0;
    for (auto& s : curve.samples) {
        maxRes = std::max(maxRes, s.residual);
        // containment in the trapezoid, outside the excluded triangle
        ok = ok && s.kappa > -1e-9 && s.kappa < 1 + 1e-9 && s.chi > -1e-9;
        ok = ok && s.kappa <= -3 * s.chi + 4 + 1e-9;
        ok = ok && s.kappa >= -3 * s.chi + 1 - 1e-9;
    }
    ok = ok && maxRes < 1e-8;
    // the excluded triangle is fully frozen: density is 0 or 1 throughout
    SplitRng rng(504, 0);
    int frozen = 0;
    for (int i = 0; i < 100; ++i) {
        double chi = rng.next_double() / 3.0;
        double kappa = 0.01 + (1 - 3 * chi - 0.02) * rng.next_double();
        if (kappa <= 0 || kappa >= 1 - 3 * chi) { ++frozen; continue; }
        double d = density(chi, kappa, p, w);
        if (std::min(std::fabs(d), std::fabs(d - 1)) < 1e-9) ++frozen;
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "max residual %.1e, %d/100 triangle points frozen",
                  maxRes, frozen);
    report(4, ok && frozen == 100, detail, now() - t0);
}

void criterion5() {
    double t0 = now();
    auto p = trapezoid_profile();
    auto w = trapezoid_weights();
    auto rep = winding_check(p, w, 100, 9);
    char detail[96];
    std::snprintf(detail, sizeof detail, "class %d, min real intersections %d",
                  rep.curveClass, rep.minRealIntersections);
    report(5, rep.curveClass == 6 && rep.minRealIntersections >= 4 && rep.pass, detail,
           now() - t0);
}

// moment of x^j against the level-kappa density, with jump locations refined
// by bisection and composite Simpson on each smooth piece
double quad_moment(int j, double kappa, const BoundaryProfile& p, const WeightProfile& w) {
    double g = to_double(p.gamma);
    double xMax = p.b_tilde(p.s - 1) / (1.0 - kappa) + 0.3;
    auto f = [&](double x) {
        return density(x * (1 - g) * (1 - kappa) + g * (1 - kappa), kappa, p, w);
    };
    const int n0 = 1200;
    std::vector<double> cuts = {0.0, xMax};
    double prev = f(0.0);
    for (int i = 1; i <= n0; ++i) {
        double x = xMax * i / n0, v = f(x);
        if (std::fabs(v - prev) > 0.25) {
            double lo = xMax * (i - 1) / n0, hi = x, flo = prev;
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi), fm = f(mid);
                if (std::fabs(fm - flo) > 0.125) hi = mid;
                else { lo = mid; flo = fm; }
            }
            cuts.push_back(0.5 * (lo + hi));
        }
        prev = v;
    }
    std::sort(cuts.begin(), cuts.end());
    double total = 0;
    for (size_t c = 0; c + 1 < cuts.size(); ++c) {
        double a = cuts[c] + 1e-12, b = cuts[c + 1] - 1e-12;
        const int m = 4000;
        double h = (b - a) / m, s = 0;
        for (int i = 0; i <= m; ++i) {
            double x = a + h * i;
            double wgt = (i == 0 || i == m) ? 1 : (i % 2 ? 4 : 2);
            s += wgt * std::pow(x, j) * f(x);
        }
        total += s * h / 3;
    }
    return total;
}

void criterion6() {
    double t0 = now();
    auto p = trapezoid_profile();
    auto w = trapezoid_weights();
    auto stair = staircase_measure(p);
    double worstQuad = 0, worstStair = 0;
    for (int j = 0; j <= 4; ++j) {
        // kappa = 0: the density degenerates to the staircase indicator, so
        // its moments integrate exactly over the tilde intervals
        double m0 = 0;
        for (size_t i = 0; i < p.s; ++i)
            m0 += (std::pow(p.b_tilde(i), j + 1) - std::pow(p.alpha_tilde(i), j + 1)) / (j + 1);
        worstQuad = std::max(worstQuad, std::fabs(moments_contour(0.0, j, p, w) - m0));
        worstStair = std::max(worstStair, std::fabs(moments_contour(0.0, j, p, w) -
                                                    stair.moment(j)));
        for (double kappa : {0.3, 0.6})
            worstQuad = std::max(worstQuad, std::fabs(moments_contour(kappa, j, p, w) -
                                                      quad_moment(j, kappa, p, w)));
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "max |contour - quadrature| %.1e, staircase %.1e",
                  worstQuad, worstStair);
    report(6, worstQuad < 1e-3 && worstStair < 1e-6, detail, now() - t0);
}

void criterion7() {
    double t0 = now();
    BlockBoundary b;
    b.s = 5;
    b.blockFrac = {Rat(1, 6), Rat(1, 6), Rat(1, 6), Rat(1, 4), Rat(1, 4)};
    b.mu = {Rat(6), Rat(5), Rat(2), Rat(1), Rat(0)};
    WeightProfile w;
    w.n = 2;
    w.yValues = {Rat(1), Rat(2)};
    w.x = Rat(1);
    auto fam = component_params(b, 2);
    auto cs = w.cs();
    bool ok = fam.n == 2 && fam.supportsDisjoint;
    // closed forms for the two component ratios and their J transforms;
    // rational-point equality at more points than the degrees allow
    for (long long k = 0; k < 12 && ok; ++k) {
        Rat t1 = Rat(2 * k + 1, 7) + 8;
        Rat psi1 = psi_exact(fam, 1, t1);
        ok = ok && psi1 == ((t1 - Rat(27, 2)) * (t1 - 11)) /
                               ((t1 - 14) * (t1 - Rat(23, 2)));
        ok = ok && j_exact(fam, 1, t1, cs) ==
                       Rat(1) / (psi1 - 1) + Rat(1) / (psi1 + 1) + Rat(1) / (2 * psi1 + 1);
        Rat t2 = Rat(2 * k + 1, 7);
        Rat psi2 = psi_exact(fam, 2, t2);
        ok = ok && psi2 == (t2 * (t2 - Rat(7, 3)) * (t2 - Rat(14, 3))) /
                               ((t2 - Rat(1, 3)) * (t2 - Rat(8, 3)) * (t2 - 5));
        ok = ok && j_exact(fam, 2, t2, cs) == Rat(1) / (psi2 - 1) + 1;
    }
    auto cc = component_curves(fam, w);
    double minDist = 1e9;
    if (cc.curves.size() == 2) {
        for (auto& a : cc.curves[0].samples)
            for (auto& bb : cc.curves[1].samples)
                minDist = std::min(minDist, std::hypot(a.chi - bb.chi, a.kappa - bb.kappa));
    } else ok = false;
    char detail[96];
    std::snprintf(detail, sizeof detail, "Psi/J exact, curve separation %.3f", minDist);
    report(7, ok && cc.regionsDisjoint && minDist > 0, detail, now() - t0);
}

void criterion8() {
    double t0 = now();
    auto spec = trapezoid_spec60();
    auto p = trapezoid_profile();
    auto w = trapezoid_weights();
    const double kappa = 0.5;
    const size_t N = spec.N, t = 30, keep = 20; // keep = (1 - gamma)(N - t)
    LevelSampler sampler(spec, 2 * t + 1);
    const long draws = 2000;
    std::vector<double> atoms;
    atoms.reserve(static_cast<size_t>(draws) * keep);
    for (long i = 0; i < draws; ++i) {
        Partition part = sampler.sample(2024, static_cast<uint64_t>(i));
        for (size_t k = 0; k < keep; ++k)
            atoms.push_back((static_cast<double>(part.part(k)) + keep - (k + 1)) /
                            static_cast<double>(keep));
    }
    std::sort(atoms.begin(), atoms.end());
    double xMax = atoms.back() + 0.2;
    std::vector<double> xs;
    for (int i = 0; i <= 800; ++i) xs.push_back(xMax * i / 800);
    auto cdf = density_cdf(p, w, kappa, xs);
    double norm = cdf.back();
    double ks = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double emp = static_cast<double>(std::upper_bound(atoms.begin(), atoms.end(), xs[i]) -
                                         atoms.begin()) /
                     static_cast<double>(atoms.size());
        ks = std::max(ks, std::fabs(emp - cdf[i] / norm));
    }
    char detail[96];
    std::snprintf(detail, sizeof detail, "Kolmogorov distance %.4f at N=%zu, %ld samples",
                  ks, N, draws);
    report(8, ks <= 0.05 && sampler.particles() == N - t, detail, now() - t0);
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    return failures == 0 ? 0 : 1;
}
