#pragma once

// Shared numeric oracles: grid sup-norm scan, central finite differences,
// composite-Simpson quadrature.  These back the tests of every other module
// and are deliberately simple.

#include "radnet/real.hpp"
#include "radnet/rng.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace radnet {

using RealFn = std::function<Real(const Real&)>;

enum class GridKind { uniform, uniform_plus_jitter };

struct GridSpec {
    double lo = 0.0;
    double hi = 1.0;
    long count = 2;         // uniform points; jitter adds count_jitter more
    GridKind kind = GridKind::uniform;
    long count_jitter = 0;  // used when kind == uniform_plus_jitter
    std::uint64_t seed = 0;

    void validate() const {
        if (!(lo < hi)) throw argument_error("GridSpec: lo < hi required");
        if (count < 2) throw argument_error("GridSpec: count >= 2 required");
    }

    std::vector<Real> points(unsigned prec) const {
        validate();
        std::vector<Real> pts;
        pts.reserve(count + (kind == GridKind::uniform_plus_jitter ? count_jitter : 0));
        Real a(lo, prec), span(hi - lo, prec);
        for (long i = 0; i < count; ++i)
            pts.push_back(a + span * (Real(static_cast<long>(i), prec) / Real(count - 1, prec)));
        if (kind == GridKind::uniform_plus_jitter) {
            Rng rng(seed);
            for (long i = 0; i < count_jitter; ++i) pts.push_back(rng.uniform_real(lo, hi, prec));
        }
        return pts;
    }

    // Default sup-norm scan grid: 1e4 uniform plus 1e3 jittered points.
    static GridSpec dense(double lo, double hi, std::uint64_t seed = 0) {
        return GridSpec{lo, hi, 10000, GridKind::uniform_plus_jitter, 1000, seed};
    }
};

// Max over grid points of |f(t) - g(t)|; a lower bound on the true sup-norm.
inline Real grid_sup_norm(const RealFn& f, const RealFn& g, const GridSpec& grid, unsigned prec) {
    Real best(prec);
    for (const Real& t : grid.points(prec)) {
        Real fv = f(t), gv = g(t);
        if (!fv.is_finite() || !gv.is_finite())
            throw evaluation_error("non-finite function value at t = " + t.to_string());
        best = max(best, abs(fv - gv));
    }
    return best;
}

inline Real grid_sup_norm(const RealFn& f, const GridSpec& grid, unsigned prec) {
    return grid_sup_norm(f, [prec](const Real&) { return Real(prec); }, grid, prec);
}

// Central-difference estimate of f^(k)(t), O(h^2) for smooth f.
inline Real finite_diff(const RealFn& f, int k, const Real& t, const Real& h) {
    if (k < 1) throw argument_error("finite_diff: order k >= 1 required");
    if (!(h > Real(0.0, h.precision_bits()))) throw argument_error("finite_diff: h > 0 required");
    const unsigned prec = t.precision_bits();
    // sum_{i=0..k} (-1)^i C(k,i) f(t + (k/2 - i) h) / h^k
    Real sum(prec);
    double binom = 1.0;
    for (int i = 0; i <= k; ++i) {
        Real offset = (Real(static_cast<long>(k), prec) / 2.0 - Real(static_cast<long>(i), prec)) * h;
        Real term = f(t + offset) * binom;
        sum = (i % 2 == 0) ? sum + term : sum - term;
        binom = binom * (k - i) / (i + 1);
    }
    return sum / pow(h, static_cast<long>(k));
}

// Composite Simpson integral of f over [a, b]; error O(n_panels^-4).
inline Real quadrature(const RealFn& f, const Real& a, const Real& b, long n_panels = 2048) {
    if (n_panels < 1) throw argument_error("quadrature: n_panels >= 1 required");
    const unsigned prec = a.precision_bits();
    const long n = 2 * n_panels;  // Simpson subintervals (even)
    Real h = (b - a) / Real(n, prec);
    auto eval = [&](long i) {
        Real v = f(a + h * Real(i, prec));
        if (!v.is_finite())
            throw evaluation_error("non-finite integrand at node " + std::to_string(i));
        return v;
    };
    Real sum = eval(0) + eval(n);
    for (long i = 1; i < n; i += 2) sum += eval(i) * 4.0;
    for (long i = 2; i < n; i += 2) sum += eval(i) * 2.0;
    return sum * h / 3.0;
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw argument_error("fit_slope: need >= 2 points");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace radnet
