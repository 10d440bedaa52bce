#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "shdimer/limitshape.hpp"

namespace shdimer {

// Boundary partition built from s constant blocks: reading parts from
// largest to smallest, the t-th distinct value mu_t occupies a fraction of
// positions; blockFrac[t-1] is the fraction K_t/N in bottom-up
// K-indexing (block t counts the parts equal to mu_{s+1-t}).
struct BlockBoundary {
    int s = 0;
    std::vector<Rat> blockFrac; // K_t/N, t = 1..s, summing to 1
    std::vector<Rat> mu;        // r_t = mu_t/N, strictly decreasing, r_s >= 0

    void validate() const {
        if (s <= 0 || blockFrac.size() != static_cast<size_t>(s) || mu.size() != static_cast<size_t>(s))
            throw std::invalid_argument("block boundary: bad sizes");
        Rat total = 0;
        for (auto& k : blockFrac) {
            if (k <= 0) throw std::invalid_argument("block boundary: fractions must be positive");
            total += k;
        }
        if (total != 1) throw std::invalid_argument("block boundary: fractions must sum to 1");
        for (int t = 0; t + 1 < s; ++t)
            if (!(mu[static_cast<size_t>(t)] > mu[static_cast<size_t>(t) + 1]))
                throw std::invalid_argument("block boundary: mu must be strictly decreasing");
        if (mu.back() < 0) throw std::invalid_argument("block boundary: mu must be nonnegative");
    }
};

// Per-component data for the disconnected liquid regions: cut points d_i,
// D_i = d_{i+1}-d_i-1, and the support ends beta_{i,k} < gamma_{i,k} of the
// component limit measures, kept exact for symbolic checks.
struct ComponentCurveFamily {
    int n = 0;
    int s = 0;
    std::vector<int> d;                 // d_1..d_{n+1}, d_1 = 1, d_{n+1} = s+1
    std::vector<std::vector<Rat>> beta; // beta[i][k], k = 0..D_i
    std::vector<std::vector<Rat>> gam;  // gamma[i][k]
    std::vector<Rat> alphaSeg, bSeg;    // segment profile of the full boundary
    bool supportsDisjoint = false;

    int D(int i) const { return d[static_cast<size_t>(i)] - d[static_cast<size_t>(i) - 1] - 1; }
};

// Exact evaluation of Psi_i at a rational point.
inline Rat psi_exact(const ComponentCurveFamily& f, int i, const Rat& t) {
    Rat num = 1, den = 1;
    for (auto& bk : f.beta[static_cast<size_t>(i) - 1]) num *= t - bk;
    for (auto& gk : f.gam[static_cast<size_t>(i) - 1]) den *= t - gk;
    if (den == 0) throw std::invalid_argument("psi_exact: pole");
    return num / den;
}

// Exact evaluation of J_i at a rational point; cs are the c_j = 1/(y_j x_1)
// (only used for i = 1).
inline Rat j_exact(const ComponentCurveFamily& f, int i, const Rat& t, const std::vector<Rat>& cs) {
    Rat psi = psi_exact(f, i, t);
    if (psi == 1) throw std::invalid_argument("j_exact: Psi = 1");
    if (i >= 2) return Rat(f.n - i + 1) + Rat(1) / (psi - 1);
    Rat v = Rat(1) / (psi - 1) + Rat(f.n - static_cast<long long>(cs.size()));
    for (auto& c : cs) {
        if (psi + c == 0) throw std::invalid_argument("j_exact: Psi = -c_j");
        v += c / (psi + c);
    }
    return v;
}

// Split the block boundary into the n per-component parameter sets of the
// disconnected-liquid-region regime.
inline ComponentCurveFamily component_params(const BlockBoundary& blocks, int n) {
    blocks.validate();
    if (n <= 0) throw std::invalid_argument("component_params: n must be positive");
    int s = blocks.s;
    ComponentCurveFamily fam;
    fam.n = n;
    fam.s = s;

    // cumulative position fractions from the top: S_t covers mu_1..mu_t;
    // block of mu_t has size K_{s+1-t}
    std::vector<Rat> S(static_cast<size_t>(s) + 1, 0);
    for (int t = 1; t <= s; ++t)
        S[static_cast<size_t>(t)] =
            S[static_cast<size_t>(t) - 1] + blocks.blockFrac[static_cast<size_t>(s - t)];

    // cut condition: each i/n must be a block boundary
    for (int i = 1; i < n; ++i) {
        Rat cut(i, n);
        bool found = false;
        for (int t = 0; t <= s; ++t)
            if (S[static_cast<size_t>(t)] == cut) found = true;
        if (!found)
            throw std::invalid_argument("component_params: cut condition fails at i=" +
                                        std::to_string(i));
    }

    // J_i = { t : block of mu_t meets ((i-1)/n, i/n] }; d_i = min J_i
    fam.d.assign(static_cast<size_t>(n) + 1, 0);
    fam.d[0] = 1;
    for (int i = 1; i <= n; ++i) {
        Rat lo(i - 1, n);
        int di = 0;
        for (int t = 1; t <= s; ++t)
            if (S[static_cast<size_t>(t)] > lo) {
                di = t;
                break;
            }
        fam.d[static_cast<size_t>(i) - 1] = di;
    }
    fam.d[static_cast<size_t>(n)] = s + 1;
    for (int i = 1; i <= n; ++i)
        if (fam.d[static_cast<size_t>(i)] <= fam.d[static_cast<size_t>(i) - 1])
            throw std::invalid_argument("component_params: empty component block");

    // segment profile of the full boundary, bottom-up: segment l holds the
    // parts equal to mu_{s+1-l}
    std::vector<Rat> cum(static_cast<size_t>(s) + 1, 0);
    for (int l = 1; l <= s; ++l)
        cum[static_cast<size_t>(l)] =
            cum[static_cast<size_t>(l) - 1] + blocks.blockFrac[static_cast<size_t>(l) - 1];
    fam.alphaSeg.resize(static_cast<size_t>(s));
    fam.bSeg.resize(static_cast<size_t>(s));
    for (int l = 1; l <= s; ++l) {
        Rat r = blocks.mu[static_cast<size_t>(s - l)];
        fam.alphaSeg[static_cast<size_t>(l) - 1] = r + cum[static_cast<size_t>(l) - 1];
        fam.bSeg[static_cast<size_t>(l) - 1] = r + cum[static_cast<size_t>(l)];
    }

    auto alphaAt = [&](int l) { return fam.alphaSeg[static_cast<size_t>(l) - 1]; };
    auto bAt = [&](int l) { return fam.bSeg[static_cast<size_t>(l) - 1]; };

    // beta_{i,k} = n(alpha_1 + sum_{l=2}^{s-d_i-k+1}(alpha_l - b_{l-1})) + (n-i+1)
    //              - n sum_{l=s-d_i-k+1}^{s-d_i+1}(b_l - alpha_l)
    // gamma_{i,k}: same with the trailing sum starting at l = s-d_i-k+2
    fam.beta.resize(static_cast<size_t>(n));
    fam.gam.resize(static_cast<size_t>(n));
    for (int i = 1; i <= n; ++i) {
        int di = fam.d[static_cast<size_t>(i) - 1];
        int Di = fam.D(i);
        for (int k = 0; k <= Di; ++k) {
            int hi = s - di - k + 1;
            Rat head = alphaAt(1);
            for (int l = 2; l <= hi; ++l) head += alphaAt(l) - bAt(l - 1);
            Rat tailB = 0, tailG = 0;
            for (int l = std::max(1, hi); l <= s - di + 1; ++l) tailB += bAt(l) - alphaAt(l);
            for (int l = std::max(1, hi + 1); l <= s - di + 1; ++l) tailG += bAt(l) - alphaAt(l);
            fam.beta[static_cast<size_t>(i) - 1].push_back(Rat(n) * head + Rat(n - i + 1) -
                                                           Rat(n) * tailB);
            fam.gam[static_cast<size_t>(i) - 1].push_back(Rat(n) * head + Rat(n - i + 1) -
                                                          Rat(n) * tailG);
        }
    }

    // support intervals [beta, gamma] must be disjoint across all (i,k)
    std::vector<std::pair<Rat, Rat>> iv;
    for (int i = 1; i <= n; ++i)
        for (int k = 0; k <= fam.D(i); ++k) {
            Rat bk = fam.beta[static_cast<size_t>(i) - 1][static_cast<size_t>(k)];
            Rat gk = fam.gam[static_cast<size_t>(i) - 1][static_cast<size_t>(k)];
            if (!(bk < gk)) throw std::invalid_argument("component_params: beta >= gamma");
            iv.push_back({bk, gk});
        }
    std::sort(iv.begin(), iv.end());
    fam.supportsDisjoint = true;
    for (size_t i = 0; i + 1 < iv.size(); ++i)
        if (!(iv[i].second <= iv[i + 1].first)) fam.supportsDisjoint = false;
    return fam;
}

namespace detail {

// P, Q, D = P-Q for Psi_i, plus the distinct-c factor polynomials used by
// the (s1) system of component 1.
struct ComponentPolys {
    std::vector<double> P, Q, D;
    std::vector<std::vector<double>> G; // P + c_j Q for distinct c_j
    std::vector<double> cDist;
    std::vector<int> cMult;

    ComponentPolys(const ComponentCurveFamily& f, int i, const WeightProfile& w) {
        P = {1.0};
        Q = {1.0};
        for (auto& bk : f.beta[static_cast<size_t>(i) - 1])
            P = ProfilePolys::mul_linear(P, to_double(bk));
        for (auto& gk : f.gam[static_cast<size_t>(i) - 1])
            Q = ProfilePolys::mul_linear(Q, to_double(gk));
        D.assign(P.size(), 0.0);
        for (size_t k = 0; k < P.size(); ++k) D[k] = P[k] - Q[k];
        while (D.size() > 1 && D.back() == 0.0) D.pop_back();
        if (i == 1) {
            for (auto& [c, m] : w.distinct_cs()) {
                cDist.push_back(to_double(c));
                cMult.push_back(m);
                std::vector<double> g(P.size());
                for (size_t k = 0; k < P.size(); ++k) g[k] = P[k] + cDist.back() * Q[k];
                G.push_back(std::move(g));
            }
        }
    }
};

} // namespace detail

// J_i(t) and its derivative for the component curves.
inline void component_j(const ComponentCurveFamily& f, int i, const WeightProfile& w, double t,
                        double& J, double& Jp) {
    detail::ComponentPolys cp(f, i, w);
    Cplx P, dP, D, dD;
    detail::ProfilePolys::eval(cp.P, Cplx(t), P, dP);
    detail::ProfilePolys::eval(cp.D, Cplx(t), D, dD);
    if (std::abs(D) == 0.0) throw std::invalid_argument("component_j: Psi = 1");
    // 1/(Psi-1) = Q/D = (P-D)/D
    Cplx v = (P - D) / D;
    Cplx dv = (dP * D - P * dD) / (D * D); // d/dt [P/D]; note d/dt[(P-D)/D] = same
    if (i >= 2) {
        J = (v + Cplx(f.n - i + 1)).real();
        Jp = dv.real();
        return;
    }
    int l = w.l();
    Cplx Q = P - D, dQ = dP - dD;
    for (size_t j = 0; j < cp.G.size(); ++j) {
        Cplx G, dG;
        detail::ProfilePolys::eval(cp.G[j], Cplx(t), G, dG);
        if (std::abs(G) == 0.0) throw std::invalid_argument("component_j: Psi = -c_j");
        // c_j/(Psi+c_j) = c_j Q / G, with multiplicity
        double cm = cp.cDist[j] * cp.cMult[j];
        v += cm * Q / G;
        dv += cm * (dQ * G - Q * dG) / (G * G);
    }
    J = (v + Cplx(f.n - l)).real();
    Jp = dv.real();
}

// Cleared-denominator polynomial in t for the (s1)/(s2) double-root systems
// at (chi, kappa).
inline Poly component_system_poly(const ComponentCurveFamily& f, int i, const WeightProfile& w,
                                  double chi, double kappa) {
    detail::ComponentPolys cp(f, i, w);
    Poly P(std::vector<Cplx>(cp.P.begin(), cp.P.end()));
    Poly D(std::vector<Cplx>(cp.D.begin(), cp.D.end()));
    Poly Q = P - D;
    if (i >= 2) {
        // (t - n*chi - kappa(n-i+1)) * (P-Q) - kappa * Q = 0
        Poly line({Cplx(-f.n * chi - kappa * (f.n - i + 1)), Cplx(1)});
        return line * D - Q * Cplx(kappa);
    }
    int l = w.l();
    Poly Gall = Poly::constant(1);
    std::vector<Poly> G;
    for (auto& g : cp.G) G.push_back(Poly(std::vector<Cplx>(g.begin(), g.end())));
    for (auto& g : G) Gall = Gall * g;
    // (t - n*chi - kappa(n-l)) (P-Q) prod G - kappa Q prod G
    //   - kappa sum_j n_j c_j Q (P-Q) prod_{j'!=j} G = 0
    Poly line({Cplx(-f.n * chi - kappa * (f.n - l)), Cplx(1)});
    Poly E = line * D * Gall - Q * Gall * Cplx(kappa);
    for (size_t j = 0; j < G.size(); ++j) {
        Poly rest = Poly::constant(1);
        for (size_t j2 = 0; j2 < G.size(); ++j2)
            if (j2 != j) rest = rest * G[j2];
        E = E - Q * D * rest * Cplx(kappa * cp.cMult[j] * cp.cDist[j]);
    }
    return E;
}

// Double-root residual of the component-i system at (chi, kappa).
inline double component_double_root_residual(double chi, double kappa,
                                             const ComponentCurveFamily& f, int i,
                                             const WeightProfile& w) {
    if (!(kappa > 0.0 && kappa < 1.0))
        throw std::invalid_argument("component_double_root_residual: kappa must be in (0,1)");
    return detail::double_root_residual_poly(component_system_poly(f, i, w, chi, kappa));
}

struct ComponentCurves {
    std::vector<FrozenBoundaryCurve> curves;
    // bounding region of curve i in chi at height kappa (Lemma 4.5 proof)
    std::vector<std::pair<double, double>> chiBoxes; // hull over kappa in [0,1]
    bool regionsDisjoint = false;
    std::string report;
};

// chi bounds of component i at height kappa.
inline std::pair<double, double> component_chi_bounds(const ComponentCurveFamily& f, int i,
                                                      double kappa) {
    int Di = f.D(i);
    double betaLow = to_double(f.beta[static_cast<size_t>(i) - 1][static_cast<size_t>(Di)]);
    double gamHigh = to_double(f.gam[static_cast<size_t>(i) - 1][0]);
    if (i == 1) return {betaLow / f.n - double(f.n - 1) / f.n, gamHigh / f.n};
    return {(betaLow - kappa * (f.n - i)) / f.n, (gamHigh - kappa * (f.n - i)) / f.n};
}

// Trace all n component curves and check the Lemma 4.5 bounding regions.
inline ComponentCurves component_curves(const ComponentCurveFamily& f, const WeightProfile& w,
                                        int gridPerComponent = 4000) {
    ComponentCurves out;
    for (int i = 1; i <= f.n; ++i) {
        // singular points: support ends and real zeros of D, G
        detail::ComponentPolys cp(f, i, w);
        std::vector<double> sing;
        for (auto& bk : f.beta[static_cast<size_t>(i) - 1]) sing.push_back(to_double(bk));
        for (auto& gk : f.gam[static_cast<size_t>(i) - 1]) sing.push_back(to_double(gk));
        auto addRoots = [&](const std::vector<double>& poly) {
            Poly pc(std::vector<Cplx>(poly.begin(), poly.end()));
            if (pc.degree() < 1) return;
            for (auto& r : poly_roots(pc))
                if (std::abs(r.imag()) < 1e-9 * (1.0 + std::abs(r.real())))
                    sing.push_back(r.real());
        };
        addRoots(cp.D);
        for (auto& g : cp.G) addRoots(g);
        std::sort(sing.begin(), sing.end());
        sing.erase(std::unique(sing.begin(), sing.end(),
                               [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                   sing.end());

        std::vector<double> grid;
        int per = std::max(8, gridPerComponent / static_cast<int>(sing.size() + 1));
        for (int k = per; k >= 1; --k)
            grid.push_back(sing.front() - 1e-4 * std::pow(10.0, 7.0 * k / per));
        for (size_t q = 0; q + 1 < sing.size(); ++q) {
            double a = sing[q], b = sing[q + 1];
            if (b - a < 1e-9) continue;
            for (int k = 0; k < per; ++k) {
                double u = 0.5 * (1.0 - std::cos(M_PI * (k + 0.5) / per));
                grid.push_back(a + (b - a) * u);
            }
        }
        for (int k = 1; k <= per; ++k)
            grid.push_back(sing.back() + 1e-4 * std::pow(10.0, 7.0 * k / per));

        FrozenBoundaryCurve curve;
        for (double t : grid) {
            double J, Jp;
            try {
                component_j(f, i, w, t, J, Jp);
            } catch (const std::invalid_argument&) {
                continue;
            }
            if (std::abs(Jp) < 1e-12) continue;
            double kappa = 1.0 / Jp;
            if (kappa < -1e-9 || kappa > 1.0 + 1e-9) continue;
            kappa = std::min(1.0, std::max(0.0, kappa));
            double chi = (t - J / Jp) / f.n;
            double res = 0.0;
            if (kappa > 1e-9 && kappa < 1.0 - 1e-9)
                res = detail::double_root_residual_poly(component_system_poly(f, i, w, chi, kappa));
            curve.samples.push_back({t, chi, kappa, res});
        }
        curve.curveClass = f.D(i);
        out.curves.push_back(std::move(curve));

        auto b0 = component_chi_bounds(f, i, 0.0);
        auto b1 = component_chi_bounds(f, i, 1.0);
        out.chiBoxes.push_back({std::min(b0.first, b1.first), std::max(b0.second, b1.second)});
    }

    // region disjointness across components
    auto boxes = out.chiBoxes;
    std::vector<size_t> order(boxes.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return boxes[a].first < boxes[b].first; });
    out.regionsDisjoint = true;
    for (size_t q = 0; q + 1 < order.size(); ++q) {
        if (boxes[order[q]].second > boxes[order[q + 1]].first) {
            out.regionsDisjoint = false;
            out.report += "bounding regions of components " + std::to_string(order[q] + 1) +
                          " and " + std::to_string(order[q + 1] + 1) + " overlap; ";
        }
    }
    if (out.regionsDisjoint) out.report = "component bounding regions pairwise disjoint";

    // confinement check per curve
    for (int i = 1; i <= f.n; ++i) {
        for (auto& smp : out.curves[static_cast<size_t>(i) - 1].samples) {
            auto bb = component_chi_bounds(f, i, smp.kappa);
            if (smp.chi < bb.first - 1e-6 || smp.chi > bb.second + 1e-6) {
                out.report += "; component " + std::to_string(i) + " escapes its region at t=" +
                              std::to_string(smp.t);
                break;
            }
        }
    }
    return out;
}

} // namespace shdimer
