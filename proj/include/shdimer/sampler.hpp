#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/float128.hpp>

#include "dimer.hpp"
#include "lattice.hpp"
#include "rng.hpp"
#include "schur.hpp"

namespace shdimer {

// ---------------------------------------------------------------------------
// Exact sequential sampler (rational arithmetic), intended for N <= 12.
//
// The chain is generated from the boundary row upward. After the first m-1
// NE-SW layers the remaining graph above a white row carrying mu has
// partition function  const * s_mu(x_m, ..., x_N)  (the product formula on
// the remaining rows), so the one-step conditionals are
//   P(nu  | mu) ~ y_{m-1}^{|nu|-|mu|} s_nu(x_m..x_N)    (vertical strip)
//   P(mu' | nu) ~ x_m^{|nu|-|mu'|}  s_mu'(x_{m+1}..x_N) (horizontal strip)
// with the a=1 layers (and the bottom layer) deterministic.
// ---------------------------------------------------------------------------

class ExactSampler {
  public:
    explicit ExactSampler(const LatticeSpec& spec) : spec_(spec) {
        spec_.validate();
        if (spec_.N > 12) throw std::invalid_argument("exact sampler limited to N <= 12");
        omega_ = boundary_partition(spec_.Omega);
        if (schur_rest(1, omega_) == 0)
            throw std::runtime_error("zero partition function: no matching exists");
    }

    BoltzmannSample sample(uint64_t seed, uint64_t index) {
        SplitRng rng(seed, index);
        BoltzmannSample out;
        out.rngSeed = seed;
        out.weight = 1;
        MatchingSequence seq;
        seq.chain.push_back(omega_);
        Partition cur = omega_;
        for (size_t m = 1; m <= spec_.N; ++m) {
            // white row 2m-1 -> black row 2m
            Partition nu = cur;
            if (m >= 2 && spec_.a_at(m - 1) == 0) {
                auto cands = vstrip_candidates(cur, m);
                nu = pick(cands, rng);
                Rat yv = spec_.y_at(m - 1);
                for (long long t = 0; t < nu.size() - cur.size(); ++t) out.weight *= yv;
            }
            seq.chain.push_back(nu);
            // black row 2m -> white row 2m+1
            auto cands = hstrip_candidates(nu, m);
            Partition nxt = pick(cands, rng);
            Rat xv = spec_.x_at(m);
            long long drop = nu.size() - nxt.size();
            for (long long t = 0; t < drop; ++t) out.weight *= xv;
            seq.chain.push_back(nxt);
            cur = nxt;
        }
        out.sequence = std::move(seq);
        return out;
    }

    // Exact probability of a full chain under the Boltzmann measure.
    Rat chain_probability(const MatchingSequence& s) {
        if (s.chain.size() != 2 * spec_.N + 1)
            throw std::invalid_argument("chain must have 2N+1 partitions");
        if (s.chain[0] != omega_) return 0;
        Rat prob = 1;
        for (size_t m = 1; m <= spec_.N; ++m) {
            const Partition& cur = s.chain[2 * m - 2];
            const Partition& nu = s.chain[2 * m - 1];
            if (m == 1 || spec_.a_at(m - 1) == 1) {
                if (nu != cur) return 0;
            } else {
                auto cands = vstrip_candidates(cur, m);
                prob *= prob_of(cands, nu);
                if (prob == 0) return 0;
            }
            const Partition& nxt = s.chain[2 * m];
            auto cands = hstrip_candidates(nu, m);
            prob *= prob_of(cands, nxt);
            if (prob == 0) return 0;
        }
        return prob;
    }

    const Partition& omega() const { return omega_; }

  private:
    LatticeSpec spec_;
    Partition omega_;
    std::map<std::pair<size_t, std::vector<long long>>, Rat> cache_;

    // s_p(x_m, ..., x_N); p must have N-m+1 parts (empty product -> 1)
    Rat schur_rest(size_t m, const Partition& p) {
        if (m > spec_.N) return 1;
        auto key = std::make_pair(m, p.parts);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        std::vector<Rat> xs;
        for (size_t t = m; t <= spec_.N; ++t) xs.push_back(spec_.x_at(t));
        Rat v = schur_exact(p, xs);
        cache_.emplace(key, v);
        return v;
    }

    using Cands = std::vector<std::pair<Partition, Rat>>;

    Cands vstrip_candidates(const Partition& mu, size_t m) {
        Cands out;
        size_t L = mu.length();
        Rat yv = spec_.y_at(m - 1);
        std::vector<long long> nu(L);
        std::function<void(size_t, long long)> rec = [&](size_t i, long long added) {
            if (i == L) {
                Partition cand{std::vector<long long>(nu)};
                Rat w = schur_rest(m, cand);
                if (w != 0) {
                    for (long long t = 0; t < added; ++t) w *= yv;
                    out.push_back({std::move(cand), w});
                }
                return;
            }
            for (long long d = 0; d <= 1; ++d) {
                long long v = mu.part(i) + d;
                if (i > 0 && v > nu[i - 1]) continue;
                nu[i] = v;
                rec(i + 1, added + d);
            }
        };
        rec(0, 0);
        if (out.empty()) throw std::runtime_error("no valid vertical-strip step");
        return out;
    }

    Cands hstrip_candidates(const Partition& nu, size_t m) {
        Cands out;
        size_t L = nu.length();
        Rat xv = spec_.x_at(m);
        std::vector<long long> mu(L - 1);
        std::function<void(size_t, long long)> rec = [&](size_t i, long long dropped) {
            if (i + 1 == L) {
                long long total = dropped + nu.part(L - 1);
                Partition cand{std::vector<long long>(mu)};
                Rat w = schur_rest(m + 1, cand);
                for (long long t = 0; t < total; ++t) w *= xv;
                if (w != 0) out.push_back({std::move(cand), w});
                return;
            }
            for (long long v = nu.part(i + 1); v <= nu.part(i); ++v) {
                mu[i] = v;
                rec(i + 1, dropped + nu.part(i) - v);
            }
        };
        if (L == 0)
            out.push_back({Partition{}, Rat(1)});
        else
            rec(0, 0);
        if (out.empty()) throw std::runtime_error("no valid horizontal-strip step");
        return out;
    }

    static Partition pick(const Cands& cands, SplitRng& rng) {
        Rat total = 0;
        for (auto& c : cands) total += c.second;
        double u = rng.next_double();
        Rat acc = 0;
        for (auto& c : cands) {
            acc += c.second;
            if (u < to_double(acc / total)) return c.first;
        }
        return cands.back().first;
    }

    static Rat prob_of(const Cands& cands, const Partition& target) {
        Rat total = 0, hit = 0;
        for (auto& c : cands) {
            total += c.second;
            if (c.first == target) hit = c.second;
        }
        return total == 0 ? Rat(0) : hit / total;
    }
};

// ---------------------------------------------------------------------------
// Float-mode sampler for large N. The chain is encoded as non-intersecting
// particles q_j = lambda_j + L - j. Across a NE-SW black->white layer with
// weight x each surviving particle steps down, p' in [q_{j+1}, q_j - 1] with
// weight x^{q_j-1-p'}, and the bottom particle exits with weight x^{q_L};
// across a white->black a=0 layer each particle steps up by 0 or 1 with
// weight y per up-step; a=1 layers are frozen. The number of weighted
// non-intersecting families below any partial configuration is a Lindstrom
// determinant of single-particle propagators, so one-step conditionals are
// ratios of determinants differing in one row, evaluated with a maintained
// inverse (Sherman-Morrison updates, rebuilt after every exit).
//
// The Lindstrom matrices can be catastrophically ill-conditioned in double
// precision (boundary data with long tight blocks gives condition numbers
// ~1e35 at N = 60), so the linear algebra runs in quad precision with
// row/column equilibration refreshed at every rebuild. Scale factors are
// shared by all candidates of a step and cancel in the conditionals.
// ---------------------------------------------------------------------------

class LgvSampler {
  public:
    using Real = boost::multiprecision::float128;

    explicit LgvSampler(const LatticeSpec& spec) : spec_(spec) {
        spec_.validate();
        omega_ = boundary_partition(spec_.Omega);
        N_ = spec_.N;
        // position grid: starts plus one per a=0 layer (max one up-step each)
        long long pmax = omega_.part(0) + static_cast<long long>(N_) - 1;
        for (size_t m = 2; m <= N_; ++m)
            if (spec_.a_at(m - 1) == 0) ++pmax;
        P_ = static_cast<size_t>(pmax) + 2;
        build_propagators();
        M_.assign(N_ * N_, Real(0));
        Minv_.assign(N_ * N_, Real(0));
        rdr_.assign(N_, Real(1));
        rdc_.assign(N_, Real(1));
    }

    BoltzmannSample sample(uint64_t seed, uint64_t index) {
        SplitRng rng(seed, index);
        BoltzmannSample out;
        out.rngSeed = seed;
        out.logWeight = 0;
        MatchingSequence seq;
        seq.chain.push_back(omega_);

        size_t F = N_; // active particles
        q_.resize(F);
        for (size_t j = 0; j < F; ++j)
            q_[j] = omega_.part(j) + static_cast<long long>(N_ - 1 - j);
        rebuild(0, F);

        for (size_t m = 1; m <= N_; ++m) {
            size_t tB = 2 * m - 1; // black row 2m
            // ---- up-step (white -> black) ----
            if (m >= 2 && spec_.a_at(m - 1) == 0) {
                double y = to_double(spec_.y_at(m - 1));
                for (size_t j = 0; j < F; ++j) {
                    bool blocked = j > 0 && q_[j] + 1 == q_[j - 1];
                    long long np = q_[j];
                    if (!blocked) {
                        Real w0 = ratio_for(j, tB, q_[j], F);
                        Real w1 = ratio_for(j, tB, q_[j] + 1, F) * y;
                        if (w0 < 0) w0 = 0;
                        if (w1 < 0) w1 = 0;
                        Real tot = w0 + w1;
                        if (!(tot > 0)) throw std::runtime_error("sampler reached a dead end");
                        if (Real(rng.next_double()) * tot >= w0) {
                            np = q_[j] + 1;
                            out.logWeight += std::log(y);
                        }
                    }
                    replace_row(j, tB, np, F);
                    q_[j] = np;
                }
            } else {
                for (size_t j = 0; j < F; ++j) replace_row(j, tB, q_[j], F);
            }
            seq.chain.push_back(positions_to_partition(q_, F));
            invert(F); // refresh: Sherman-Morrison drift compounds over a layer
            // ---- down-step (black -> white), bottom particle exits ----
            double x = to_double(spec_.x_at(m));
            bool xzero = spec_.x_at(m) == 0;
            size_t tW2 = 2 * m; // white row 2m+1
            for (size_t j = 0; j + 1 < F; ++j) {
                long long lo = q_[j + 1], hi = q_[j] - 1;
                long long np;
                if (xzero) {
                    np = hi; // only x^0 survives
                    if (np < lo) throw std::runtime_error("sampler reached a dead end");
                } else if (lo == hi) {
                    np = hi; // forced, no conditioning needed
                } else {
                    Real tot = 0, xp = 1;
                    w_.resize(static_cast<size_t>(hi - lo + 1));
                    for (long long p = hi; p >= lo; --p) {
                        Real r = ratio_for(j, tW2, p, F);
                        if (r < 0) r = 0;
                        r *= xp;
                        w_[static_cast<size_t>(p - lo)] = r;
                        tot += r;
                        xp *= x;
                    }
                    if (!(tot > 0)) throw std::runtime_error("sampler reached a dead end");
                    Real u = Real(rng.next_double()) * tot, acc = 0;
                    np = lo;
                    for (long long p = hi; p >= lo; --p) {
                        acc += w_[static_cast<size_t>(p - lo)];
                        if (u < acc) { np = p; break; }
                    }
                }
                out.logWeight += static_cast<double>(q_[j] - 1 - np) * std::log(xzero ? 1.0 : x);
                replace_row(j, tW2, np, F);
                q_[j] = np;
            }
            // exit of the bottom particle
            if (xzero) {
                if (q_[F - 1] != 0) throw std::runtime_error("sampler reached a dead end");
            } else {
                out.logWeight += static_cast<double>(q_[F - 1]) * std::log(x);
            }
            --F;
            seq.chain.push_back(positions_to_partition(q_, F));
            if (F > 0) rebuild(tW2, F);
        }
        out.sequence = std::move(seq);
        out.weight = 0; // float mode reports logWeight
        return out;
    }

  private:
    LatticeSpec spec_;
    Partition omega_;
    size_t N_ = 0, P_ = 0;
    // U_[t][p * N + (exit-1)] : propagator from (time t, position p) to an
    // exit at layer `exit`; times are row-1 (0 = bottom white row). Each
    // (t, exit) column is max-normalized; scales cancel in the ratios.
    std::vector<std::vector<Real>> U_;
    // scaled Lindstrom matrix, its inverse, and reciprocal row/col scales
    std::vector<Real> M_, Minv_, rdr_, rdc_;
    std::vector<long long> q_;
    std::vector<Real> w_;

    Real U_at(size_t t, long long p, size_t exitLayer) const {
        if (p < 0 || static_cast<size_t>(p) >= P_) return 0;
        return U_[t][static_cast<size_t>(p) * N_ + (exitLayer - 1)];
    }

    static Partition positions_to_partition(const std::vector<long long>& q, size_t F) {
        std::vector<long long> parts(F);
        for (size_t j = 0; j < F; ++j)
            parts[j] = q[j] - static_cast<long long>(F - 1 - j);
        return Partition(std::move(parts));
    }

    Real& Mat(std::vector<Real>& A, size_t i, size_t j) { return A[i * N_ + j]; }

    // fill the scaled matrix from current positions at time t, equilibrate
    // (several max-scaling rounds: diagonal scaling can shave ~17 orders off
    // the condition number here, which is what makes quad precision enough),
    // and invert
    void rebuild(size_t t, size_t F) {
        for (size_t i = 0; i < F; ++i)
            for (size_t j = 0; j < F; ++j)
                Mat(M_, i, j) = U_at(t, q_[i], N_ - j);
        std::fill(rdc_.begin(), rdc_.begin() + F, Real(1));
        std::fill(rdr_.begin(), rdr_.begin() + F, Real(1));
        for (int round = 0; round < 8; ++round) {
            for (size_t j = 0; j < F; ++j) {
                Real mx = 0;
                for (size_t i = 0; i < F; ++i) {
                    Real a = abs(Mat(M_, i, j));
                    if (a > mx) mx = a;
                }
                if (mx > 0) {
                    Real inv = 1 / mx;
                    rdc_[j] *= inv;
                    for (size_t i = 0; i < F; ++i) Mat(M_, i, j) *= inv;
                }
            }
            for (size_t i = 0; i < F; ++i) {
                Real mx = 0;
                for (size_t j = 0; j < F; ++j) {
                    Real a = abs(Mat(M_, i, j));
                    if (a > mx) mx = a;
                }
                if (mx > 0) {
                    Real inv = 1 / mx;
                    rdr_[i] *= inv;
                    for (size_t j = 0; j < F; ++j) Mat(M_, i, j) *= inv;
                }
            }
        }
        invert(F);
    }

    // Gauss-Jordan with partial pivoting: Minv <- inverse of top-left F x F
    void invert(size_t F) {
        std::vector<Real> A(M_.begin(), M_.end());
        for (size_t i = 0; i < F; ++i)
            for (size_t j = 0; j < F; ++j) Mat(Minv_, i, j) = i == j ? 1 : 0;
        for (size_t c = 0; c < F; ++c) {
            size_t piv = c;
            Real best = abs(Mat(A, c, c));
            for (size_t i = c + 1; i < F; ++i) {
                Real a = abs(Mat(A, i, c));
                if (a > best) { best = a; piv = i; }
            }
            if (!(best > 0)) throw std::runtime_error("sampler reached a dead end");
            if (piv != c)
                for (size_t j = 0; j < F; ++j) {
                    std::swap(Mat(A, c, j), Mat(A, piv, j));
                    std::swap(Mat(Minv_, c, j), Mat(Minv_, piv, j));
                }
            Real inv = 1 / Mat(A, c, c);
            for (size_t j = 0; j < F; ++j) {
                Mat(A, c, j) *= inv;
                Mat(Minv_, c, j) *= inv;
            }
            for (size_t i = 0; i < F; ++i) {
                if (i == c) continue;
                Real f = Mat(A, i, c);
                if (f == 0) continue;
                for (size_t j = 0; j < F; ++j) {
                    Mat(A, i, j) -= f * Mat(A, c, j);
                    Mat(Minv_, i, j) -= f * Mat(Minv_, c, j);
                }
            }
        }
    }

    // det(M with row j <- scaled U[t][p][cols]) / det(M), via v . Minv col j
    Real ratio_for(size_t j, size_t t, long long p, size_t F) {
        if (p < 0 || static_cast<size_t>(p) >= P_) return 0;
        Real r = 0;
        const Real* row = &U_[t][static_cast<size_t>(p) * N_];
        for (size_t k = 0; k < F; ++k)
            r += row[N_ - 1 - k] * rdc_[k] * Mat(Minv_, k, j);
        return r * rdr_[j];
    }

    // Sherman-Morrison rank-1 row replacement keeping Minv in sync
    void replace_row(size_t j, size_t t, long long p, size_t F) {
        std::vector<Real> v(F), d(F), MinvTd(F);
        for (size_t k = 0; k < F; ++k) {
            v[k] = U_at(t, p, N_ - k) * rdc_[k] * rdr_[j];
            d[k] = v[k] - Mat(M_, j, k);
        }
        // M' = M + e_j d^T, so Minv' = Minv - (Minv e_j)(d^T Minv)/denom
        for (size_t k = 0; k < F; ++k) {
            Real acc = 0;
            for (size_t l = 0; l < F; ++l) acc += Mat(Minv_, l, k) * d[l];
            MinvTd[k] = acc;
        }
        Real denom = 1 + MinvTd[j];
        for (size_t k = 0; k < F; ++k) Mat(M_, j, k) = v[k];
        if (abs(denom) < Real(1e-28)) {
            invert(F);
        } else {
            std::vector<Real> col(F);
            for (size_t i = 0; i < F; ++i) col[i] = Mat(Minv_, i, j) / denom;
            for (size_t i = 0; i < F; ++i)
                for (size_t k = 0; k < F; ++k) Mat(Minv_, i, k) -= col[i] * MinvTd[k];
        }
        // keep the replaced row near unit scale so later updates stay balanced
        Real mx = 0;
        for (size_t k = 0; k < F; ++k) {
            Real a = abs(Mat(M_, j, k));
            if (a > mx) mx = a;
        }
        if (mx > 0 && (mx > 1e6 || mx < 1e-6)) {
            Real f = 1 / mx;
            rdr_[j] *= f;
            for (size_t k = 0; k < F; ++k) Mat(M_, j, k) *= f;
            for (size_t i = 0; i < F; ++i) Mat(Minv_, i, j) *= mx;
        }
    }

    void build_propagators() {
        size_t T = 2 * N_ + 1;
        U_.assign(T, std::vector<Real>(P_ * N_, Real(0)));
        // backward over layers; time t = row-1
        for (size_t m = N_; m >= 1; --m) {
            size_t tB = 2 * m - 1, tW2 = 2 * m;
            Real x = Real(to_double(spec_.x_at(m)));
            bool xzero = spec_.x_at(m) == 0;
            // black row 2m: exit here, or step down toward exits above
            for (size_t e = m; e <= N_; ++e) {
                if (e == m) {
                    if (xzero) {
                        U_[tB][0 * N_ + (e - 1)] = 1; // x^0 from position 0
                    } else {
                        Real xp = 1;
                        for (size_t p = 0; p < P_; ++p) {
                            U_[tB][p * N_ + (e - 1)] = xp;
                            xp *= x;
                        }
                    }
                } else {
                    // T[p] = sum_{p'=0}^{p-1} x^{p-1-p'} U[tW2][p'][e]
                    Real run = 0;
                    for (size_t p = 0; p < P_; ++p) {
                        U_[tB][p * N_ + (e - 1)] = run;
                        run = (xzero ? Real(0) : run * x) + U_[tW2][p * N_ + (e - 1)];
                    }
                }
            }
            normalize(tB);
            // white row 2m-1: up-step into black row 2m
            size_t tW = 2 * m - 2;
            bool frozen = m == 1 || spec_.a_at(m - 1) == 1;
            Real y = frozen ? Real(0) : Real(to_double(spec_.y_at(m - 1)));
            for (size_t e = m; e <= N_; ++e) {
                for (size_t p = 0; p < P_; ++p) {
                    Real v = U_[tB][p * N_ + (e - 1)];
                    if (!frozen && p + 1 < P_) v += y * U_[tB][(p + 1) * N_ + (e - 1)];
                    U_[tW][p * N_ + (e - 1)] = v;
                }
            }
            normalize(tW);
        }
    }

    // single scale per time slab: rows of the Lindstrom matrix mix times, so
    // scaling here must be row-uniform; fine-grained balancing happens at the
    // per-rebuild equilibration instead
    void normalize(size_t t) {
        Real mx = 0;
        for (const Real& v : U_[t])
            if (v > mx) mx = v;
        if (mx > 0)
            for (Real& v : U_[t]) v /= mx;
    }
};

} // namespace shdimer
