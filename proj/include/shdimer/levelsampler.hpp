#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/float128.hpp>

#include "dimer.hpp"
#include "lattice.hpp"
#include "rng.hpp"

namespace shdimer {

// ---------------------------------------------------------------------------
// Marginal sampler for the partition at one fixed chain level.
//
// Full-chain sequential sampling conditions on reaching the top boundary
// through determinants whose scaled values can be as small as e^{-2000};
// no fixed-precision inverse survives that. The single-level marginal is
// better behaved: with 60 starts and the exits split below/above the level,
// the level configuration is a biorthogonal ensemble
//   P(r) ~ det[A(i, r_k)] det[B(r_k, j)]
// whose correlation kernel K = B G^{-1} A (G = start-to-exit Gram matrix)
// has entries that are bounded correlations. The kernel is built once in
// high-precision arithmetic (escalating until self-checks pass), then each
// sample is a cheap determinantal point process draw from the fixed kernel.
// ---------------------------------------------------------------------------

class LevelSampler {
  public:
    using Quad = boost::multiprecision::float128;

    // chainIndex in [1, 2N]: index into the interlacing chain, 0 = boundary
    LevelSampler(const LatticeSpec& spec, size_t chainIndex) : spec_(spec), T_(chainIndex) {
        spec_.validate();
        N_ = spec_.N;
        if (T_ < 1 || T_ > 2 * N_)
            throw std::invalid_argument("level sampler: chain index out of range");
        omega_ = boundary_partition(spec_.Omega);
        F_ = N_ - T_ / 2; // particles remaining at the level
        if (F_ == 0) throw std::invalid_argument("level sampler: level above the last particle");
        long long pmax = omega_.part(0) + static_cast<long long>(N_) - 1;
        for (size_t m = 2; m <= N_; ++m)
            if (spec_.a_at(m - 1) == 0) ++pmax;
        P_ = static_cast<size_t>(pmax) + 2;
        using boost::multiprecision::cpp_bin_float;
        using boost::multiprecision::et_off;
        using boost::multiprecision::number;
        // precision ladder; needed digits grow like the log of the Gram
        // determinant's dynamic range, roughly O(N^2) for blocky boundaries
        int rung = N_ < 20 ? 0 : N_ < 40 ? 1 : N_ < 80 ? 2 : 3;
        bool ok = false;
        if (!ok && rung <= 0) ok = build<number<cpp_bin_float<220>, et_off>>();
        if (!ok && rung <= 1) ok = build<number<cpp_bin_float<700>, et_off>>();
        if (!ok && rung <= 2) ok = build<number<cpp_bin_float<2200>, et_off>>();
        if (!ok) ok = build<number<cpp_bin_float<6000>, et_off>>();
        if (!ok)
            throw std::runtime_error("level sampler: kernel construction did not converge");
    }

    size_t particles() const { return F_; }

    // correlation kernel on the particle position grid
    const std::vector<double>& kernel() const { return Kd_; }
    size_t positions() const { return P_; }

    Partition sample(uint64_t seed, uint64_t index) const {
        SplitRng rng(seed, index);
        std::vector<Quad> K(Kq_);
        std::vector<long long> occ;
        for (size_t s = 0; s < P_; ++s) {
            Quad d = K[s * P_ + s];
            if (d < 0) d = 0;
            if (d > 1) d = 1;
            bool on = Quad(rng.next_double()) < d;
            if (on) occ.push_back(static_cast<long long>(s));
            Quad denom = on ? d : d - 1;
            if (abs(denom) < Quad(1e-30)) continue; // deterministic site, rank-1 part vanishes
            std::vector<Quad> col(P_);
            for (size_t i = 0; i < P_; ++i) col[i] = K[i * P_ + s] / denom;
            const std::vector<Quad> row(K.begin() + s * P_, K.begin() + (s + 1) * P_);
            for (size_t i = 0; i < P_; ++i) {
                if (col[i] == 0) continue;
                for (size_t j = 0; j < P_; ++j) K[i * P_ + j] -= col[i] * row[j];
            }
        }
        if (occ.size() != F_)
            throw std::runtime_error("level sampler: draw lost particles (kernel accuracy)");
        // positions descending -> partition parts
        std::vector<long long> parts(F_);
        for (size_t k = 0; k < F_; ++k)
            parts[k] = occ[F_ - 1 - k] - static_cast<long long>(F_ - 1 - k);
        return Partition(std::move(parts));
    }

  private:
    LatticeSpec spec_;
    Partition omega_;
    size_t N_ = 0, P_ = 0, F_ = 0, T_ = 0;
    std::vector<double> Kd_;
    std::vector<Quad> Kq_;

    // exact-over-mp construction of the kernel; false if self-checks fail
    template <class R> bool build() {
        size_t nStarts = N_, nLower = T_ / 2, nUpper = N_ - nLower;
        // forward vectors for every start, evolved micro-step by micro-step
        std::vector<std::vector<R>> f(nStarts, std::vector<R>(P_, R(0)));
        for (size_t i = 0; i < nStarts; ++i) {
            long long q = omega_.part(i) + static_cast<long long>(N_ - 1 - i);
            f[i][static_cast<size_t>(q)] = 1;
        }
        // exitW[i][m-1] for lower exits m = 1..nLower
        std::vector<std::vector<R>> exitW(nStarts, std::vector<R>(nLower, R(0)));
        std::vector<R> tmp(P_);
        for (size_t t = 1; t <= T_; ++t) {
            size_t m = (t + 1) / 2;
            if (t % 2 == 1) {
                // up-step of layer m (frozen copy when a=1 or m=1)
                if (m >= 2 && spec_.a_at(m - 1) == 0) {
                    R y = rat_to<R>(spec_.y_at(m - 1));
                    for (auto& v : f)
                        for (size_t p = P_; p-- > 1;) v[p] += y * v[p - 1];
                }
            } else {
                // down-step of layer m: record the exit weight, then transfer
                R x = rat_to<R>(spec_.x_at(m));
                bool xzero = spec_.x_at(m) == 0;
                for (size_t i = 0; i < nStarts; ++i) {
                    if (m <= nLower) {
                        R e = 0, xp = 1;
                        for (size_t p = 0; p < P_; ++p) {
                            e += f[i][p] * xp;
                            xp *= x;
                            if (xzero) break; // only position 0 contributes
                        }
                        exitW[i][m - 1] = e;
                    }
                    R run = 0;
                    for (size_t p = P_; p-- > 0;) {
                        tmp[p] = run;
                        run = (xzero ? R(0) : run * x) + f[i][p];
                    }
                    f[i] = tmp;
                }
            }
        }
        // backward vectors for the upper exits, evolved down to slab T
        std::vector<std::vector<R>> b(nUpper, std::vector<R>(P_, R(0)));
        for (size_t e = nLower + 1; e <= N_; ++e) {
            std::vector<R>& v = b[e - nLower - 1];
            size_t tB = 2 * e - 1;
            R x = rat_to<R>(spec_.x_at(e));
            bool xzero = spec_.x_at(e) == 0;
            if (xzero) {
                v[0] = 1;
            } else {
                R xp = 1;
                for (size_t p = 0; p < P_; ++p) {
                    v[p] = xp;
                    xp *= x;
                }
            }
            for (size_t t = tB; t-- > T_;) {
                size_t mm = (t + 2) / 2;
                if (t % 2 == 0) {
                    // slab t is white row below the up-step of layer mm = t/2+1
                    if (mm >= 2 && spec_.a_at(mm - 1) == 0) {
                        R y = rat_to<R>(spec_.y_at(mm - 1));
                        for (size_t p = 0; p + 1 < P_; ++p) tmp[p] = v[p] + y * v[p + 1];
                        tmp[P_ - 1] = v[P_ - 1];
                        v = tmp;
                    }
                } else {
                    // slab t is black row of layer mm = (t+1)/2; exits above pass
                    // the down-step: V[p] = sum_{p'<p} x^{p-1-p'} V'[p']
                    R x2 = rat_to<R>(spec_.x_at(mm));
                    bool x2zero = spec_.x_at(mm) == 0;
                    R run = 0;
                    for (size_t p = 0; p < P_; ++p) {
                        R keep = v[p];
                        tmp[p] = run;
                        run = (x2zero ? R(0) : run * x2) + keep;
                    }
                    v = tmp;
                }
            }
        }
        // Gram matrix: columns = lower exits then upper exits
        size_t F0 = nStarts;
        std::vector<R> G(F0 * F0);
        for (size_t i = 0; i < F0; ++i) {
            for (size_t j = 0; j < nLower; ++j) G[i * F0 + j] = exitW[i][j];
            for (size_t j = 0; j < nUpper; ++j) {
                R acc = 0;
                for (size_t p = 0; p < P_; ++p) acc += f[i][p] * b[j][p];
                G[i * F0 + nLower + j] = acc;
            }
        }
        // invert G (Gauss-Jordan, partial pivoting)
        std::vector<R> Gi(F0 * F0, R(0));
        for (size_t i = 0; i < F0; ++i) Gi[i * F0 + i] = 1;
        {
            std::vector<R> Acp(G);
            for (size_t c = 0; c < F0; ++c) {
                size_t piv = c;
                R best = abs(Acp[c * F0 + c]);
                for (size_t i = c + 1; i < F0; ++i) {
                    R a = abs(Acp[i * F0 + c]);
                    if (a > best) { best = a; piv = i; }
                }
                if (!(best > 0))
                    throw std::runtime_error("level sampler: zero partition function");
                if (piv != c)
                    for (size_t j = 0; j < F0; ++j) {
                        std::swap(Acp[c * F0 + j], Acp[piv * F0 + j]);
                        std::swap(Gi[c * F0 + j], Gi[piv * F0 + j]);
                    }
                R inv = 1 / Acp[c * F0 + c];
                for (size_t j = 0; j < F0; ++j) {
                    Acp[c * F0 + j] *= inv;
                    Gi[c * F0 + j] *= inv;
                }
                for (size_t i = 0; i < F0; ++i) {
                    if (i == c) continue;
                    R fac = Acp[i * F0 + c];
                    if (fac == 0) continue;
                    for (size_t j = 0; j < F0; ++j) {
                        Acp[i * F0 + j] -= fac * Acp[c * F0 + j];
                        Gi[i * F0 + j] -= fac * Gi[c * F0 + j];
                    }
                }
            }
        }
        // K(p,p') = sum_{j upper, i} B(p,j) Gi(lower+j, i) A(i,p')
        // first T1 = Gi[upper rows] * A  (nUpper x P)
        std::vector<R> T1(nUpper * P_, R(0));
        for (size_t j = 0; j < nUpper; ++j)
            for (size_t i = 0; i < F0; ++i) {
                R g = Gi[(nLower + j) * F0 + i];
                if (g == 0) continue;
                for (size_t p = 0; p < P_; ++p) T1[j * P_ + p] += g * f[i][p];
            }
        // extended kernel over real positions plus one virtual site per lower
        // exit (virtual sites are a.s. occupied; they make K a projection)
        size_t S = P_ + nLower;
        auto Arow = [&](size_t i, size_t s) -> const R& {
            return s < P_ ? f[i][s] : exitW[i][s - P_];
        };
        std::vector<R> K(S * S, R(0));
        for (size_t s = 0; s < S; ++s) {
            if (s < P_) {
                for (size_t j = 0; j < nUpper; ++j) {
                    R w = b[j][s];
                    if (w == 0) continue;
                    for (size_t ss = 0; ss < S; ++ss)
                        K[s * S + ss] += w * (ss < P_ ? T1[j * P_ + ss] : T1e(T1, Gi, f, exitW, j, ss - P_, F0, nLower));
                }
            } else {
                // B-row of a virtual exit site is the unit vector of its exit
                size_t j = s - P_; // lower exit index, column j of G
                for (size_t i = 0; i < F0; ++i) {
                    R g = Gi[j * F0 + i];
                    if (g == 0) continue;
                    for (size_t ss = 0; ss < S; ++ss) K[s * S + ss] += g * Arow(i, ss);
                }
            }
        }
        // self-checks: projection property, full trace == N, diagonals in [0,1]
        R tr = 0;
        for (size_t s = 0; s < S; ++s) {
            R d = K[s * S + s];
            if (d < -R(1e-25) || d > 1 + R(1e-25)) return false;
            tr += d;
        }
        if (abs(tr - R(static_cast<double>(N_))) > R(1e-25)) return false;
        double worst = 0;
        for (size_t s = 0; s < S; ++s)
            for (size_t ss = 0; ss < S; ++ss) {
                R acc = 0;
                for (size_t q = 0; q < S; ++q) acc += K[s * S + q] * K[q * S + ss];
                double dv = static_cast<double>(abs(acc - K[s * S + ss]));
                if (dv > worst) worst = dv;
            }
        if (worst > 1e-25) return false;
        // restrict to the real positions (restriction of a determinantal
        // process keeps the restricted kernel)
        Kq_.resize(P_ * P_);
        Kd_.resize(P_ * P_);
        for (size_t p = 0; p < P_; ++p)
            for (size_t pp = 0; pp < P_; ++pp) {
                const R& v = K[p * S + pp];
                double hi = static_cast<double>(v);
                double lo = static_cast<double>(v - R(hi));
                Kq_[p * P_ + pp] = Quad(hi) + Quad(lo);
                Kd_[p * P_ + pp] = hi;
            }
        return true;
    }

    // element ss of (Gi[upper row j] * A) for a virtual column
    template <class R>
    static R T1e(const std::vector<R>&, const std::vector<R>& Gi,
                 const std::vector<std::vector<R>>&, const std::vector<std::vector<R>>& exitW,
                 size_t j, size_t e, size_t F0, size_t nLower) {
        R acc = 0;
        for (size_t i = 0; i < F0; ++i) acc += Gi[(nLower + j) * F0 + i] * exitW[i][e];
        return acc;
    }

    template <class R> static R rat_to(const Rat& r) {
        using boost::multiprecision::denominator;
        using boost::multiprecision::numerator;
        return R(numerator(r)) / R(denominator(r));
    }
};

} // namespace shdimer
