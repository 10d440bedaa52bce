#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "shdimer/common.hpp"
#include "shdimer/partition.hpp"
#include "shdimer/polyroots.hpp"
#include "shdimer/rng.hpp"

namespace shdimer {

// Piecewise boundary profile: the rescaled bottom partition has density 1 on
// the intervals [alpha_i, b_i] (0 = alpha_1 < b_1 < ... < alpha_s < b_s,
// total length 1) and gamma is the limiting fraction of zero parts appended
// by the x=0 columns. Tilded values rescale away the zero block.
struct BoundaryProfile {
    int s = 0;
    std::vector<Rat> alpha;
    std::vector<Rat> b;
    Rat gamma = 0;

    void validate() const {
        if (s <= 0 || alpha.size() != static_cast<size_t>(s) || b.size() != static_cast<size_t>(s))
            throw std::invalid_argument("boundary profile: bad segment count");
        if (alpha[0] != 0) throw std::invalid_argument("boundary profile: alpha_1 must be 0");
        Rat mass = 0;
        for (int i = 0; i < s; ++i) {
            if (!(alpha[static_cast<size_t>(i)] < b[static_cast<size_t>(i)]))
                throw std::invalid_argument("boundary profile: need alpha_i < b_i");
            if (i + 1 < s && !(b[static_cast<size_t>(i)] < alpha[static_cast<size_t>(i) + 1]))
                throw std::invalid_argument("boundary profile: need b_i < alpha_{i+1}");
            mass += b[static_cast<size_t>(i)] - alpha[static_cast<size_t>(i)];
        }
        if (mass != 1) throw std::invalid_argument("boundary profile: interval lengths must sum to 1");
        if (gamma < 0 || gamma >= 1 || gamma > b[0])
            throw std::invalid_argument("boundary profile: need 0 <= gamma <= b_1, gamma < 1");
    }

    double gamma_d() const { return to_double(gamma); }
    double alpha_tilde(int i) const {
        if (i == 0) return 0.0;
        return to_double((alpha[static_cast<size_t>(i)] - gamma) / (1 - gamma));
    }
    double b_tilde(int i) const {
        return to_double((b[static_cast<size_t>(i)] - gamma) / (1 - gamma));
    }
};

// Weight data entering the limit shape: the common column weight x, and the
// y_i for the rows i in I_2 (rows carrying free y-weights) among one period.
struct WeightProfile {
    int n = 0;
    std::vector<Rat> yValues; // y_i for i in I_2 cap [n], with multiplicity
    Rat x = 1;

    int l() const { return static_cast<int>(yValues.size()); }

    std::vector<Rat> cs() const {
        std::vector<Rat> c;
        for (auto& y : yValues) {
            if (y <= 0 || x <= 0) throw std::invalid_argument("weight profile: need y_i, x > 0");
            c.push_back(Rat(1) / (y * x));
        }
        return c;
    }

    // distinct c values with multiplicities, descending
    std::vector<std::pair<Rat, int>> distinct_cs() const {
        auto c = cs();
        std::sort(c.begin(), c.end(), std::greater<Rat>());
        std::vector<std::pair<Rat, int>> d;
        for (auto& v : c) {
            if (!d.empty() && d.back().first == v) d.back().second++;
            else d.push_back({v, 1});
        }
        return d;
    }

    void validate() const {
        if (n <= 0) throw std::invalid_argument("weight profile: n must be positive");
        if (l() > n) throw std::invalid_argument("weight profile: more y values than rows in a period");
        (void)cs();
    }
};

// Limit measure: either a unit-density staircase (interval union) or an
// empirical atom list.
struct LimitMeasure {
    bool staircase = true;
    std::vector<std::pair<double, double>> intervals; // staircase support
    CountingMeasure atoms;

    double mass() const {
        if (staircase) {
            double m = 0;
            for (auto& iv : intervals) m += iv.second - iv.first;
            return m;
        }
        return to_double(atoms.total_mass());
    }

    double moment(int j) const {
        if (staircase) {
            double m = 0;
            for (auto& iv : intervals)
                m += (std::pow(iv.second, j + 1) - std::pow(iv.first, j + 1)) / (j + 1);
            return m;
        }
        double m = 0;
        for (auto& a : atoms.atoms) m += std::pow(to_double(a.first), j) * to_double(a.second);
        return m;
    }
};

inline LimitMeasure staircase_measure(const BoundaryProfile& p) {
    LimitMeasure m;
    for (int i = 0; i < p.s; ++i) m.intervals.push_back({p.alpha_tilde(i), p.b_tilde(i)});
    return m;
}

// Phi_s(t) = prod (t - alpha~_i) / prod (t - b~_i)
inline Cplx phi_s(const BoundaryProfile& p, Cplx t) {
    Cplx num = 1, den = 1;
    for (int i = 0; i < p.s; ++i) {
        num *= t - p.alpha_tilde(i);
        den *= t - p.b_tilde(i);
    }
    if (std::abs(den) == 0.0) throw std::invalid_argument("phi_s: pole at b~_i");
    return num / den;
}

// St(t) = log Phi_s(t): Stieltjes transform of the unit-density staircase.
inline Cplx stieltjes_staircase(const BoundaryProfile& p, Cplx t) {
    Cplx v = phi_s(p, t);
    if (std::abs(v) == 0.0) throw std::invalid_argument("stieltjes_staircase: branch point");
    return std::log(v);
}

namespace detail {

// Phi_s and its t-derivative via P, Q, P', Q'.
inline void phi_and_deriv(const BoundaryProfile& p, Cplx t, Cplx& phi, Cplx& dphi) {
    Cplx P = 1, Q = 1, dP = 0, dQ = 0;
    for (int i = 0; i < p.s; ++i) {
        Cplx fa = t - p.alpha_tilde(i), fb = t - p.b_tilde(i);
        dP = dP * fa + P;
        dQ = dQ * fb + Q;
        P *= fa;
        Q *= fb;
    }
    if (std::abs(Q) == 0.0) throw std::invalid_argument("phi_s: pole at b~_i");
    phi = P / Q;
    dphi = (dP * Q - P * dQ) / (Q * Q);
}

} // namespace detail

namespace detail {

// P = prod(t-alpha~), Q = prod(t-b~), D = P-Q, G_i = P + c_i Q, as real
// coefficient arrays. Working with D's coefficients directly avoids the
// catastrophic cancellation of Phi_s(t)-1 for large |t| (both P and Q are
// monic, so the leading terms cancel exactly in coefficient space).
struct ProfilePolys {
    std::vector<double> P, Q, D;
    std::vector<std::vector<double>> G;

    ProfilePolys(const BoundaryProfile& p, const WeightProfile& w) {
        P = {1.0};
        Q = {1.0};
        for (int i = 0; i < p.s; ++i) {
            P = mul_linear(P, p.alpha_tilde(i));
            Q = mul_linear(Q, p.b_tilde(i));
        }
        D.assign(P.size(), 0.0);
        for (size_t i = 0; i < P.size(); ++i) D[i] = P[i] - Q[i];
        while (D.size() > 1 && D.back() == 0.0) D.pop_back();
        for (auto& c : w.cs()) {
            std::vector<double> g(P.size());
            double cd = to_double(c);
            for (size_t i = 0; i < P.size(); ++i) g[i] = P[i] + cd * Q[i];
            G.push_back(std::move(g));
        }
    }

    static std::vector<double> mul_linear(const std::vector<double>& f, double root) {
        std::vector<double> r(f.size() + 1, 0.0);
        for (size_t i = 0; i < f.size(); ++i) {
            r[i + 1] += f[i];
            r[i] -= root * f[i];
        }
        return r;
    }

    static void eval(const std::vector<double>& f, Cplx t, Cplx& v, Cplx& dv) {
        v = 0;
        dv = 0;
        for (size_t i = f.size(); i-- > 0;) {
            dv = dv * t + v;
            v = v * t + f[i];
        }
    }
};

} // namespace detail

// J(t) = Phi[1/(Phi-1) - (1/(n(1-gamma))) sum_i 1/(Phi+c_i)]
//      = P/D - (1/(n(1-gamma))) sum_i P/G_i   (cleared form, stable at large t)
inline Cplx j_function(const BoundaryProfile& p, const WeightProfile& w, Cplx t) {
    detail::ProfilePolys pp(p, w);
    double ng = w.n * (1.0 - p.gamma_d());
    Cplx P, dP, D, dD;
    detail::ProfilePolys::eval(pp.P, t, P, dP);
    detail::ProfilePolys::eval(pp.D, t, D, dD);
    if (std::abs(D) == 0.0) throw std::invalid_argument("j_function: Phi_s = 1");
    Cplx v = P / D;
    for (auto& g : pp.G) {
        Cplx G, dG;
        detail::ProfilePolys::eval(g, t, G, dG);
        if (std::abs(G) == 0.0) throw std::invalid_argument("j_function: Phi_s = -c_i");
        v -= P / (G * ng);
    }
    return v;
}

// J'(t) from the same cleared form.
inline Cplx j_prime(const BoundaryProfile& p, const WeightProfile& w, Cplx t) {
    detail::ProfilePolys pp(p, w);
    double ng = w.n * (1.0 - p.gamma_d());
    Cplx P, dP, D, dD;
    detail::ProfilePolys::eval(pp.P, t, P, dP);
    detail::ProfilePolys::eval(pp.D, t, D, dD);
    if (std::abs(D) == 0.0) throw std::invalid_argument("j_prime: Phi_s = 1");
    Cplx v = (dP * D - P * dD) / (D * D);
    for (auto& g : pp.G) {
        Cplx G, dG;
        detail::ProfilePolys::eval(g, t, G, dG);
        if (std::abs(G) == 0.0) throw std::invalid_argument("j_prime: Phi_s = -c_i");
        v -= (dP * G - P * dG) / (G * G * ng);
    }
    return v;
}

struct CurveSample {
    double t, chi, kappa, residual;
};

struct FrozenBoundaryCurve {
    std::vector<CurveSample> samples;
    int curveClass = 0;
};

namespace detail {

// Cleared-denominator polynomial in t for the density system: substitute
// z = Phi_s(t) into t = kappa*z/(z-1) - (kappa*z/(n(1-gamma))) sum 1/(z+c_i) + C
// with C = (chi - gamma(1-kappa))/(1-gamma), then multiply through by
// (P-Q) prod_i (P + c_i Q).
inline Poly density_poly(const BoundaryProfile& p, const WeightProfile& w, Cplx chi, double kappa) {
    Poly P = Poly::constant(1), Q = Poly::constant(1);
    for (int i = 0; i < p.s; ++i) {
        P = P * Poly::linear_root(p.alpha_tilde(i));
        Q = Q * Poly::linear_root(p.b_tilde(i));
    }
    Poly A = P - Q;
    std::vector<Poly> G;
    for (auto& c : w.cs()) G.push_back(P + Q * Cplx(to_double(c)));
    Poly Gall = Poly::constant(1);
    for (auto& g : G) Gall = Gall * g;
    double gm = p.gamma_d();
    Cplx C = (chi - gm * (1.0 - kappa)) / (1.0 - gm);
    Poly E = Poly::linear_root(C) * A * Gall - P * Gall * Cplx(kappa);
    if (!G.empty()) {
        double coef = kappa / (w.n * (1.0 - gm));
        Poly sum = Poly::constant(0);
        for (size_t i = 0; i < G.size(); ++i) {
            Poly rest = Poly::constant(1);
            for (size_t j = 0; j < G.size(); ++j)
                if (j != i) rest = rest * G[j];
            sum = sum + rest;
        }
        E = E + P * A * sum * Cplx(coef);
    }
    return E;
}

// min over critical points tc of |E(tc)| / scale; ~0 iff E has a double root.
inline double double_root_residual_poly(const Poly& E) {
    Poly dE = E.derivative();
    if (dE.degree() < 1) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (auto& tc : poly_roots(dE)) {
        double scale = 0, pw = 1, at = std::max(1.0, std::abs(tc));
        for (auto& c : E.c) {
            scale += std::abs(c) * pw;
            pw *= at;
        }
        if (scale == 0) continue;
        best = std::min(best, std::abs(E.eval(tc)) / scale);
    }
    return best;
}

} // namespace detail

// Residual of the double-root condition for the liquid-region system at
// (chi, kappa); vanishes exactly on the frozen boundary.
inline double double_root_residual(double chi, double kappa, const BoundaryProfile& p,
                                   const WeightProfile& w) {
    if (!(kappa > 0.0 && kappa < 1.0))
        throw std::invalid_argument("double_root_residual: kappa must be in (0,1)");
    return detail::double_root_residual_poly(detail::density_poly(p, w, Cplx(chi), kappa));
}

// Density of the level-kappa limit measure at position (chi, kappa) in the
// rescaled lattice coordinates. Liquid points have a unique non-real
// conjugate pair z = Phi_s(t); the density is -arg(z)/pi for the root with
// Im z < 0. Frozen points are classified 0/1 by the sign of z on the
// physical branch, picked out by a +i*eps perturbation of chi (the physical
// branch is the one pushed to Im z < 0).
inline double density(double chi, double kappa, const BoundaryProfile& p, const WeightProfile& w) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("density: kappa must be in (0,1)");
    Poly E = detail::density_poly(p, w, Cplx(chi), kappa);
    auto roots = poly_roots(E);
    Cplx zLiquid = 0;
    bool liquid = false;
    double bestIm = 0;
    for (auto& t : roots) {
        if (std::abs(t.imag()) > 1e-7 * (1.0 + std::abs(t.real()))) {
            Cplx z = phi_s(p, t);
            if (z.imag() > 0) z = std::conj(z);
            if (!liquid || std::abs(z.imag()) > bestIm) {
                liquid = true;
                zLiquid = z;
                bestIm = std::abs(z.imag());
            }
        }
    }
    if (liquid) {
        double d = -std::arg(zLiquid) / M_PI;
        return std::min(1.0, std::max(0.0, d));
    }
    // frozen: perturb chi upward into the complex plane and find the branch
    // with Im z < 0 (the Stieltjes branch); its sign decides 0 vs 1.
    const double eps = 1e-8;
    Poly Ep = detail::density_poly(p, w, Cplx(chi, eps), kappa);
    double minIm = std::numeric_limits<double>::infinity();
    Cplx zPhys = 1;
    for (auto& t : poly_roots(Ep)) {
        Cplx z = phi_s(p, t);
        if (z.imag() < minIm) {
            minIm = z.imag();
            zPhys = z;
        }
    }
    return zPhys.real() > 0 ? 0.0 : 1.0;
}

// Frozen boundary parametrization chi(t), kappa(t) over a real t grid, with
// adaptive refinement where the curve bends, keeping samples with
// kappa in [0,1] and recording the double-root residual at each point.
inline FrozenBoundaryCurve frozen_boundary(const BoundaryProfile& p, const WeightProfile& w,
                                           const std::vector<double>& tGrid) {
    auto eval = [&](double t, CurveSample& out) -> bool {
        Cplx J, Jp;
        try {
            J = j_function(p, w, Cplx(t));
            Jp = j_prime(p, w, Cplx(t));
        } catch (const std::invalid_argument&) {
            return false;
        }
        double jp = Jp.real();
        if (std::abs(jp) < 1e-12) return false;
        double kappa = 1.0 / jp;
        if (kappa < -1e-9 || kappa > 1.0 + 1e-9) return false;
        kappa = std::min(1.0, std::max(0.0, kappa));
        double gm = p.gamma_d();
        double chi = (1.0 - gm) * (t - kappa * J.real()) + gm * (1.0 - kappa);
        double res = 0.0;
        if (kappa > 1e-9 && kappa < 1.0 - 1e-9)
            res = detail::double_root_residual_poly(detail::density_poly(p, w, Cplx(chi), kappa));
        out = {t, chi, kappa, res};
        return true;
    };

    FrozenBoundaryCurve curve;
    if (tGrid.size() < 2) throw std::invalid_argument("frozen_boundary: grid too small");
    // subdivide [a,b] while the midpoint strays from the chord
    std::function<void(double, const CurveSample&, double, const CurveSample&, int)> refine =
        [&](double ta, const CurveSample& sa, double tb, const CurveSample& sb, int depth) {
            curve.samples.push_back(sa);
            if (depth >= 7) return;
            double tm = 0.5 * (ta + tb);
            CurveSample sm;
            if (!eval(tm, sm)) return;
            double dx = sm.chi - 0.5 * (sa.chi + sb.chi);
            double dy = sm.kappa - 0.5 * (sa.kappa + sb.kappa);
            if (dx * dx + dy * dy > 1e-6) {
                curve.samples.pop_back();
                refine(ta, sa, tm, sm, depth + 1);
                refine(tm, sm, tb, sb, depth + 1);
            }
        };
    CurveSample prev;
    bool havePrev = false;
    double prevT = 0;
    bool any = false;
    for (double t : tGrid) {
        CurveSample s;
        if (!eval(t, s)) {
            if (havePrev) curve.samples.push_back(prev);
            havePrev = false;
            continue;
        }
        any = true;
        if (havePrev) refine(prevT, prev, t, s, 0);
        prev = s;
        prevT = t;
        havePrev = true;
    }
    if (havePrev) curve.samples.push_back(prev);
    if (!any) throw std::invalid_argument("frozen_boundary: no regular grid points");
    return curve;
}

// Real t grid avoiding the parametrization's singular points (support edges,
// zeros of Phi_s - 1 and Phi_s + c_i).
inline std::vector<double> default_t_grid(const BoundaryProfile& p, const WeightProfile& w,
                                          int count = 2000) {
    Poly P = Poly::constant(1), Q = Poly::constant(1);
    for (int i = 0; i < p.s; ++i) {
        P = P * Poly::linear_root(p.alpha_tilde(i));
        Q = Q * Poly::linear_root(p.b_tilde(i));
    }
    std::vector<double> sing;
    for (int i = 0; i < p.s; ++i) {
        sing.push_back(p.alpha_tilde(i));
        sing.push_back(p.b_tilde(i));
    }
    auto addRealRoots = [&](const Poly& f) {
        for (auto& r : poly_roots(f))
            if (std::abs(r.imag()) < 1e-9 * (1.0 + std::abs(r.real()))) sing.push_back(r.real());
    };
    addRealRoots(P - Q);
    for (auto& c : w.cs()) addRealRoots(P + Q * Cplx(to_double(c)));
    std::sort(sing.begin(), sing.end());
    sing.erase(std::unique(sing.begin(), sing.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               sing.end());

    std::vector<double> grid;
    int perInterval = std::max(8, count / static_cast<int>(sing.size() + 1));
    // unbounded ends: geometric spacing away from the extreme singularities
    for (int k = perInterval; k >= 1; --k)
        grid.push_back(sing.front() - 1e-4 * std::pow(10.0, 7.0 * k / perInterval));
    for (size_t i = 0; i + 1 < sing.size(); ++i) {
        double a = sing[i], b = sing[i + 1];
        if (b - a < 1e-9) continue;
        for (int k = 0; k < perInterval; ++k) {
            // cosine spacing piles points near both endpoints
            double u = 0.5 * (1.0 - std::cos(M_PI * (k + 0.5) / perInterval));
            grid.push_back(a + (b - a) * u);
        }
    }
    for (int k = 1; k <= perInterval; ++k)
        grid.push_back(sing.back() + 1e-4 * std::pow(10.0, 7.0 * k / perInterval));
    return grid;
}

// Dual (cloud) curve point for parameter t.
inline std::pair<double, double> dual_curve(const BoundaryProfile& p, const WeightProfile& w,
                                            double t) {
    double gm = p.gamma_d();
    double tt = (1.0 - gm) * t + gm;
    if (std::abs(tt) < 1e-14) throw std::invalid_argument("dual_curve: (1-gamma)t + gamma = 0");
    double Jt = (1.0 - gm) * j_function(p, w, Cplx(t)).real() + gm;
    return {-1.0 / tt, -Jt / tt};
}

// Class of the cloud curve: (m+1) s, minus dropped segments at gamma = b_1.
inline int cloud_class(const BoundaryProfile& p, const WeightProfile& w) {
    int m = static_cast<int>(w.distinct_cs().size());
    if (p.gamma == p.b[0]) return (m + 1) * (p.s - 1);
    return (m + 1) * p.s;
}

namespace detail {

// Intersection polynomial of the dual curve with the line yv = c*xv + d,
// written in the untilded coordinate u = (1-gamma)t + gamma:
// (c - d*u) = Jt(u) with
// Jt(u) = (n-l)/n + (1-gamma)/(Phit-1) + (1/n) sum_j n_j c_j/(Phit+c_j),
// Phit(u) = (u-gamma) prod_{i>=2}(u-alpha_i) / prod(u-b_i).
inline Poly dual_line_poly(const BoundaryProfile& p, const WeightProfile& w, double c, double d) {
    Poly P = Poly::linear_root(p.gamma_d());
    Poly Q = Poly::constant(1);
    for (int i = 0; i < p.s; ++i) {
        if (i > 0) P = P * Poly::linear_root(to_double(p.alpha[static_cast<size_t>(i)]));
        Q = Q * Poly::linear_root(to_double(p.b[static_cast<size_t>(i)]));
    }
    if (p.gamma == p.b[0])
        throw std::invalid_argument("dual_line_poly: gamma = b_1 degenerate case not supported");
    auto dcs = w.distinct_cs();
    Poly A = P - Q;
    std::vector<Poly> G;
    for (auto& [cv, mult] : dcs) G.push_back(P + Q * Cplx(to_double(cv)));
    Poly Gall = Poly::constant(1);
    for (auto& g : G) Gall = Gall * g;
    double gm = p.gamma_d();
    double K = static_cast<double>(w.n - w.l()) / w.n;
    // (c - d*u - K) * A * Gall - (1-gm) Q Gall - (1/n) sum n_j c_j Q A prod_{j'!=j} G
    Poly line({Cplx(c - K), Cplx(-d)});
    Poly E = line * A * Gall - Q * Gall * Cplx(1.0 - gm);
    for (size_t j = 0; j < G.size(); ++j) {
        Poly rest = Poly::constant(1);
        for (size_t j2 = 0; j2 < G.size(); ++j2)
            if (j2 != j) rest = rest * G[j2];
        double coef = dcs[j].second * to_double(dcs[j].first) / static_cast<double>(w.n);
        E = E - Q * A * rest * Cplx(coef);
    }
    return E;
}

} // namespace detail

struct WindingReport {
    int curveClass = 0;
    int minRealIntersections = 0;
    bool pass = false;
    std::vector<int> counts;
};

// Sample random lines against the dual curve and count real intersections;
// a cloud curve of class d meets every real line in >= d-2 real points.
inline WindingReport winding_check(const BoundaryProfile& p, const WeightProfile& w, int numLines,
                                   uint64_t seed = 12345) {
    WindingReport rep;
    rep.curveClass = cloud_class(p, w);
    rep.minRealIntersections = std::numeric_limits<int>::max();
    SplitRng rng(seed, 0);
    int made = 0;
    while (made < numLines) {
        double c = 8.0 * (rng.next_double() - 0.5);
        double d = 8.0 * (rng.next_double() - 0.5);
        if (std::abs(d) < 1e-3) continue;
        Poly E = detail::dual_line_poly(p, w, c, d);
        if (E.degree() != rep.curveClass) continue; // degenerate line, resample
        int real = 0;
        for (auto& r : poly_roots(E))
            if (std::abs(r.imag()) < 1e-7 * (1.0 + std::abs(r.real()))) ++real;
        rep.counts.push_back(real);
        rep.minRealIntersections = std::min(rep.minRealIntersections, real);
        ++made;
    }
    rep.pass = rep.minRealIntersections >= rep.curveClass - 2;
    return rep;
}

namespace detail {

// t*(z): the branch of the functional inverse of Phi_s with t -> infinity as
// z -> 1; it is the large root of P(t) - z Q(t) = 0.
inline Cplx phi_inverse_large(const BoundaryProfile& p, Cplx z) {
    Poly P = Poly::constant(1), Q = Poly::constant(1);
    for (int i = 0; i < p.s; ++i) {
        P = P * Poly::linear_root(p.alpha_tilde(i));
        Q = Q * Poly::linear_root(p.b_tilde(i));
    }
    Poly E = P - Q * z;
    Cplx best = 0;
    double bestAbs = -1;
    for (auto& r : poly_roots(E)) {
        if (std::abs(r) > bestAbs) {
            bestAbs = std::abs(r);
            best = r;
        }
    }
    return best;
}

} // namespace detail

// j-th moment of the level-kappa measure via the contour-integral formula.
// F_kappa(z) = zH'(z)/(1-kappa) + (kappa z/(n(1-kappa)(1-gamma))) sum y_i x/(1+y_i x z)
//            + z/(z-1),
// and zH'(z) = t*(z) - z/(z-1) where t*(z) inverts Phi_s = exp St on the
// branch through infinity (so the S-transform chain never needs a series
// inversion). The middle terms combine to
// F_kappa(z) = t*(z)/(1-kappa) - (kappa/(1-kappa)) z/(z-1) + (sum term).
inline double moments_contour(double kappa, int j, const BoundaryProfile& p,
                              const WeightProfile& w) {
    if (j < 0) throw std::invalid_argument("moments_contour: j must be >= 0");
    if (!(kappa >= 0.0 && kappa < 1.0))
        throw std::invalid_argument("moments_contour: kappa must be in [0,1)");
    double gm = p.gamma_d();
    std::vector<double> yx;
    for (auto& y : w.yValues) yx.push_back(to_double(y * w.x));
    auto F = [&](Cplx z) -> Cplx {
        Cplx ts = detail::phi_inverse_large(p, z);
        Cplx v = ts / (1.0 - kappa) - (kappa / (1.0 - kappa)) * z / (z - Cplx(1));
        if (!yx.empty()) {
            Cplx sum = 0;
            for (double a : yx) sum += a / (Cplx(1) + a * z);
            v += kappa / (w.n * (1.0 - kappa) * (1.0 - gm)) * z * sum;
        }
        return v;
    };
    const int M = 600;
    double r = 0.05;
    double prev = std::numeric_limits<double>::quiet_NaN();
    double prevMag = 0;
    for (int shrink = 0; shrink < 10; ++shrink, r *= 0.6) {
        Cplx acc = 0;
        double maxMag = 0;
        bool blowup = false;
        for (int k = 0; k < M; ++k) {
            double th = 2.0 * M_PI * (k + 0.5) / M;
            Cplx e(std::cos(th), std::sin(th));
            Cplx z = Cplx(1) + r * e;
            Cplx fv = F(z);
            if (!std::isfinite(std::abs(fv)) || std::abs(fv) > 1e8) {
                blowup = true;
                break;
            }
            Cplx term = std::pow(fv, j + 1) * e / z;
            maxMag = std::max(maxMag, std::abs(term));
            acc += term;
        }
        if (blowup) continue;
        double val = (acc * (r / (M * (j + 1.0)))).real();
        // the quadrature error floor is set by cancellation among terms of
        // size maxMag; demand agreement between radii at that floor
        double tol = std::max(1e-9 * (1.0 + std::abs(val)),
                              1e-12 * std::max(maxMag, prevMag) * r / (j + 1.0));
        if (!std::isnan(prev) && std::abs(val - prev) < tol) return prev;
        prev = val;
        prevMag = maxMag;
    }
    throw std::runtime_error("moments_contour: contour integral did not stabilize");
}

// CDF of the level-kappa measure on the x axis, by quadrature of the density
// profile; xs must be increasing.
inline std::vector<double> density_cdf(const BoundaryProfile& p, const WeightProfile& w,
                                       double kappa, const std::vector<double>& xs) {
    double gm = p.gamma_d();
    std::vector<double> cdf(xs.size(), 0.0);
    double acc = 0.0, prevX = xs.empty() ? 0.0 : xs[0];
    double prevF = xs.empty() ? 0.0 : density(xs[0] * (1 - gm) * (1 - kappa) + gm * (1 - kappa),
                                              kappa, p, w);
    for (size_t i = 0; i < xs.size(); ++i) {
        double chi = xs[i] * (1 - gm) * (1 - kappa) + gm * (1 - kappa);
        double f = density(chi, kappa, p, w);
        if (i > 0) acc += 0.5 * (f + prevF) * (xs[i] - prevX);
        cdf[i] = acc;
        prevX = xs[i];
        prevF = f;
    }
    return cdf;
}

} // namespace shdimer
