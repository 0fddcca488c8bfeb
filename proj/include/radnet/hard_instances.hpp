#pragma once

// Lower-bound machinery: the compactly supported bump, the sign-indexed
// packing family of radial functions, pairwise sup distances, and the
// closed-form lower-bound curves.
//
// The bump must vanish outside (-1/2, 1/2), have a prescribed peak, and lie
// in the Hoelder class with constant c0 * 2^{v-1}.  For r = s + v with
// s = 0 the extremal profile  c0 2^{v-1} (1/2 - |t|)^v  attains the peak
// c0/2 exactly.  For s = 1 no function satisfies peak c0/2 at all: with
// g'(+-1/2) = 0 and g' in Lip(v, cap) the peak is at most
// 2 cap (1/4)^{1+v}/(1+v), which the implementation attains and records.
// Distances therefore scale with the ACHIEVED peak: any two members that
// differ in at least one sign are exactly 2 * peak * (N*)^{-r} apart.

#include "radnet/numeric.hpp"
#include "radnet/real.hpp"
#include "radnet/rng.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace radnet {

struct PackingBump {
    int s = 0;
    double v = 1.0;
    double c0 = 1.0;
    double holder_cap = 1.0;  // c0 * 2^{v-1}
    double peak = 0.5;        // achieved max of the bump
    bool peak_is_nominal = true;  // whether peak == c0/2

    // g~(t); zero outside (-1/2, 1/2)
    double eval(double t) const {
        double a = std::abs(t);
        if (a >= 0.5) return 0.0;
        if (s == 0) return holder_cap * std::pow(0.5 - a, v);
        // s == 1: integral of the signed double hump below
        double I;
        if (a >= 0.25) {
            I = std::pow(0.5 - a, 1.0 + v) / (1.0 + v);
        } else {
            I = (2.0 * std::pow(0.25, 1.0 + v) - std::pow(a, 1.0 + v)) / (1.0 + v);
        }
        return holder_cap * I;
    }

    // g~^(s)(t)
    double deriv_s(double t) const {
        if (s == 0) return eval(t);
        double a = std::abs(t);
        if (a >= 0.5) return 0.0;
        double mag = a >= 0.25 ? std::pow(0.5 - a, v) : std::pow(a, v);
        return t <= 0.0 ? holder_cap * mag : -holder_cap * mag;
    }
};

inline PackingBump make_bump(double r, double c0) {
    if (!(r > 0.0) || !(c0 > 0.0)) throw argument_error("make_bump: r, c0 > 0 required");
    int s = static_cast<int>(std::ceil(r)) - 1;
    double v = r - s;
    if (s > 1)
        throw construction_error("make_bump: no supported bump profile for s = " + std::to_string(s) +
                                 " (smoothness r = " + std::to_string(r) + " exceeds the s <= 1 family)");
    if (s == 1 && v < 1.0 - 1e-12)
        throw construction_error("make_bump: fractional smoothness between 1 and 2 is not supported; "
                                 "the derivative profile would exceed its Hoelder cap across the sign flip");
    PackingBump b;
    b.s = s;
    b.v = v;
    b.c0 = c0;
    b.holder_cap = c0 * std::pow(2.0, v - 1.0);
    if (s == 0) {
        b.peak = c0 / 2.0;
        b.peak_is_nominal = true;
    } else {
        // cap-attaining profile; the nominal c0/2 peak is infeasible for s >= 1
        b.peak = 2.0 * b.holder_cap * std::pow(0.25, 1.0 + v) / (1.0 + v);
        b.peak_is_nominal = false;
    }
    return b;
}

using SignVector = std::vector<int>;  // entries +1 / -1

struct PackingFamily {
    int n_star = 1;
    double r = 1.0;
    double c0 = 1.0;
    PackingBump bump;

    double center(int j) const { return (2.0 * j - 1.0) / (2.0 * n_star); }  // j = 1..N*
    double scale() const { return std::pow(static_cast<double>(n_star), -r); }

    // member evaluated on the squared-radius axis t in [0, 1]
    double member_g(const SignVector& signs, double t) const {
        if (static_cast<int>(signs.size()) != n_star)
            throw argument_error("packing member: signs length must equal N*");
        double sum = 0.0;
        for (int j = 1; j <= n_star; ++j)
            sum += signs[j - 1] * bump.eval(n_star * (t - center(j)));
        return scale() * sum;
    }

    double member_g_deriv_s(const SignVector& signs, double t) const {
        double sum = 0.0;
        for (int j = 1; j <= n_star; ++j)
            sum += signs[j - 1] * bump.deriv_s(n_star * (t - center(j)));
        return scale() * std::pow(static_cast<double>(n_star), bump.s) * sum;
    }
};

inline PackingFamily make_packing_family(int n_star, double r, double c0) {
    if (n_star < 1) throw argument_error("packing family: N* >= 1 required");
    return PackingFamily{n_star, r, c0, make_bump(r, c0)};
}

// f(x) = sum_j eps_j (N*)^{-r} g~(N*(|x|^2 - xi_j))
inline double packing_member(const PackingFamily& fam, const SignVector& signs,
                             const std::vector<double>& x) {
    double t = 0.0;
    for (double xi : x) t += xi * xi;
    return fam.member_g(signs, t);
}

inline std::vector<SignVector> enumerate_signs(int n_star, int cap = 16) {
    if (n_star > cap)
        throw argument_error("sign enumeration capped at N* = " + std::to_string(cap) +
                             "; use sampling for larger families");
    std::vector<SignVector> all;
    all.reserve(1u << n_star);
    for (unsigned mask = 0; mask < (1u << n_star); ++mask) {
        SignVector s(n_star);
        for (int j = 0; j < n_star; ++j) s[j] = (mask >> j) & 1 ? 1 : -1;
        all.push_back(std::move(s));
    }
    return all;
}

inline SignVector sample_signs(int n_star, Rng& rng) {
    SignVector s(n_star);
    for (int j = 0; j < n_star; ++j) s[j] = rng.uniform() < 0.5 ? -1 : 1;
    return s;
}

// Grid sup distance along the squared-radius axis; the theory value is
// 2 * peak * (N*)^{-r}  (= c0 (N*)^{-r} when the peak is nominal).
inline double pairwise_packing_distance(const PackingFamily& fam, const SignVector& a,
                                        const SignVector& b, long grid_points = 10000) {
    if (a == b) throw argument_error("pairwise distance: sign vectors must differ");
    double worst = 0.0;
    for (long i = 0; i <= grid_points; ++i) {
        double t = static_cast<double>(i) / grid_points;
        worst = std::max(worst, std::abs(fam.member_g(a, t) - fam.member_g(b, t)));
    }
    return worst;
}

// Sampled Hoelder constant of a member's s-th derivative on [0, 1],
// stratified toward the sub-interval edges where the kinks sit.
inline double member_sampled_holder(const PackingFamily& fam, const SignVector& signs, long pairs,
                                    std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    const double v = fam.bump.v;
    for (long i = 0; i < pairs; ++i) {
        double t1, t2;
        if (i % 3 == 2) {
            int j = 1 + static_cast<int>(rng.uniform() * fam.n_star);
            double edge = fam.center(j) + (rng.uniform() < 0.5 ? -0.5 : 0.5) / fam.n_star;
            t1 = std::min(1.0, std::max(0.0, edge + rng.uniform(-0.05, 0.05)));
            t2 = std::min(1.0, std::max(0.0, edge + rng.uniform(-0.05, 0.05)));
        } else {
            t1 = rng.uniform();
            t2 = rng.uniform();
        }
        if (t1 == t2) continue;
        double num = std::abs(fam.member_g_deriv_s(signs, t1) - fam.member_g_deriv_s(signs, t2));
        worst = std::max(worst, num / std::pow(std::abs(t1 - t2), v));
    }
    return worst;
}

// Closed-form lower-bound curves.
struct LowerBoundParams {
    double r = 1.0;
    double c0 = 1.0;
    int d = 2;
    double beta = 1.0;
    double C1p = 1.0;
    double C2p = 1.0;
    int L = 2;
    std::vector<long> n_values;
};

struct LowerBoundRow {
    long n = 0;
    double shallow = 0.0;      // n^{-r/(d-1)}
    double deep = 0.0;         // (L^2 n log2 n)^{-r}
    double explicit_bound = 0.0;  // C3' [n log2(n + C4')]^{-r}
    long n_star = 0;
};

struct LowerBoundTable {
    double C3p = 0.0, C4p = 0.0;
    std::vector<LowerBoundRow> rows;
};

inline LowerBoundTable lower_bound_curves(const LowerBoundParams& p) {
    if (p.n_values.empty()) throw argument_error("lower_bound_curves: n_values must be nonempty");
    LowerBoundTable tab;
    const double bexp = p.beta + 2.0 * p.r + 4.0;
    tab.C3p = p.c0 / 8.0 * std::pow(bexp, -p.r);
    tab.C4p = 2.0 * p.C1p + 4.0 * p.C2p / p.c0 * std::pow(bexp, p.r);
    for (long n : p.n_values) {
        LowerBoundRow row;
        row.n = n;
        row.shallow = std::pow(static_cast<double>(n), -p.r / (p.d - 1));
        double l2 = std::log2(static_cast<double>(n));
        row.deep = l2 > 0 ? std::pow(p.L * p.L * n * l2, -p.r) : 1.0;
        row.explicit_bound = tab.C3p * std::pow(n * std::log2(n + tab.C4p), -p.r);
        row.n_star = static_cast<long>(
            std::floor(bexp * n * std::log2(2.0 * p.C1p + 4.0 * p.C2p * std::pow(bexp, p.r) / p.c0 + n)));
        tab.rows.push_back(row);
    }
    return tab;
}

}  // namespace radnet
