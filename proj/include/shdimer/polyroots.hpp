#pragma once

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace shdimer {

using Cplx = std::complex<double>;

// Dense polynomial, coefficient k = coefficient of t^k.
struct Poly {
    std::vector<Cplx> c;

    Poly() : c{Cplx(0)} {}
    explicit Poly(std::vector<Cplx> cc) : c(std::move(cc)) { trim(); }
    static Poly constant(Cplx v) { return Poly({v}); }
    // t - a
    static Poly linear_root(Cplx a) { return Poly({-a, Cplx(1)}); }

    void trim() {
        while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
    }
    int degree() const { return static_cast<int>(c.size()) - 1; }

    Cplx eval(Cplx t) const {
        Cplx r = 0;
        for (size_t i = c.size(); i-- > 0;) r = r * t + c[i];
        return r;
    }

    Poly derivative() const {
        if (c.size() <= 1) return Poly();
        std::vector<Cplx> d(c.size() - 1);
        for (size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
        return Poly(std::move(d));
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<Cplx> r(std::max(a.c.size(), b.c.size()), Cplx(0));
        for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
        for (size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
        return Poly(std::move(r));
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<Cplx> r(std::max(a.c.size(), b.c.size()), Cplx(0));
        for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
        for (size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
        return Poly(std::move(r));
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        std::vector<Cplx> r(a.c.size() + b.c.size() - 1, Cplx(0));
        for (size_t i = 0; i < a.c.size(); ++i)
            for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
        return Poly(std::move(r));
    }
    friend Poly operator*(const Poly& a, Cplx s) {
        Poly r = a;
        for (auto& v : r.c) v *= s;
        r.trim();
        return r;
    }

    double coeff_scale() const {
        double m = 0;
        for (auto& v : c) m = std::max(m, std::abs(v));
        return m;
    }
};

// Companion-matrix roots followed by a few Newton polishing passes.
inline std::vector<Cplx> poly_roots(const Poly& pIn) {
    Poly p = pIn;
    p.trim();
    int d = p.degree();
    if (d <= 0) return {};
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(d, d);
    Cplx lead = p.c[static_cast<size_t>(d)];
    for (int i = 0; i < d; ++i) {
        comp(i, d - 1) = -p.c[static_cast<size_t>(i)] / lead;
        if (i > 0) comp(i, i - 1) = 1;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue solver failed");
    std::vector<Cplx> roots(static_cast<size_t>(d));
    Poly dp = p.derivative();
    for (int i = 0; i < d; ++i) {
        Cplx r = es.eigenvalues()(i);
        for (int it = 0; it < 8; ++it) {
            Cplx f = p.eval(r), df = dp.eval(r);
            if (std::abs(df) < 1e-300) break;
            Cplx step = f / df;
            if (!std::isfinite(std::abs(step))) break;
            r -= step;
            if (std::abs(step) < 1e-14 * (1.0 + std::abs(r))) break;
        }
        roots[static_cast<size_t>(i)] = r;
    }
    return roots;
}

} // namespace shdimer
