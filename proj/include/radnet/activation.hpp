#pragma once

// The four named sigmoidal activations with exact higher-derivative
// evaluation, anchor-point selection, and the tail functional
// delta(A) = sup_{t>=A} max(|1-phi(t)|, |phi(-t)|).
//
// Derivatives come from per-activation closed recurrences with integer
// coefficients, not finite differences:
//   logistic      phi' = phi(1-phi)        =>  phi^(k) = P_k(phi)
//   tanh-shifted  phi(t) = logistic(2t)    =>  phi^(k) = 2^k P_k(logistic(2t))
//   arctan        phi' = 1/(pi(1+t^2))     =>  phi^(k) = Q_k(t)/(pi(1+t^2)^k)
//   gompertz      phi = e^{-u}, u = e^{-t} =>  phi^(k) = phi * G_k(u)
// Coefficient tables are exact in 128-bit integers up to order 18.

#include "radnet/numeric.hpp"
#include "radnet/real.hpp"
#include "radnet/rng.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace radnet {

inline constexpr int kMaxSupportedDerivOrder = 18;

namespace detail {

using i128 = __int128;

inline Real to_real(i128 c, unsigned prec) {
    bool neg = c < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-c) : static_cast<unsigned __int128>(c);
    Real hi(static_cast<double>(0), prec);
    mpfr_set_uj(hi.raw(), static_cast<std::uintmax_t>(u >> 64), MPFR_RNDN);
    Real lo(prec);
    mpfr_set_uj(lo.raw(), static_cast<std::uintmax_t>(u & ~std::uintmax_t(0)), MPFR_RNDN);
    Real two64(prec);
    mpfr_set_ui_2exp(two64.raw(), 1, 64, MPFR_RNDN);
    Real r = hi * two64 + lo;
    return neg ? -r : r;
}

using IPoly = std::vector<i128>;  // ascending coefficients

inline IPoly ipoly_derivative(const IPoly& p) {
    IPoly d;
    for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<i128>(i));
    return d;
}

inline Real ipoly_eval(const IPoly& p, const Real& x) {
    const unsigned prec = x.precision_bits();
    Real acc(prec);
    for (size_t i = p.size(); i-- > 0;) acc = acc * x + to_real(p[i], prec);
    return acc;
}

// P_k with sigma^(k) = P_k(sigma); P_0 = x, P_{k+1} = P_k' * (x - x^2).
inline const IPoly& logistic_poly(int k) {
    static std::vector<IPoly> table = {{0, 1}};
    while (static_cast<int>(table.size()) <= k) {
        IPoly d = ipoly_derivative(table.back());
        IPoly next(d.size() + 2, 0);
        for (size_t i = 0; i < d.size(); ++i) {
            next[i + 1] += d[i];
            next[i + 2] -= d[i];
        }
        table.push_back(std::move(next));
    }
    return table[k];
}

// Q_k with (d/dt)^k arctan = Q_k(t)/(1+t^2)^k; Q_1 = 1,
// Q_{k+1} = Q_k'(1+t^2) - 2k t Q_k.
inline const IPoly& arctan_poly(int k) {
    static std::vector<IPoly> table = {{}, {1}};
    while (static_cast<int>(table.size()) <= k) {
        int m = static_cast<int>(table.size()) - 1;
        const IPoly& q = table.back();
        IPoly d = ipoly_derivative(q);
        IPoly next(q.size() + 1, 0);
        for (size_t i = 0; i < d.size(); ++i) {
            next[i] += d[i];
            next[i + 2] += d[i];
        }
        for (size_t i = 0; i < q.size(); ++i) next[i + 1] -= static_cast<i128>(2 * m) * q[i];
        table.push_back(std::move(next));
    }
    return table[k];
}

// G_k with phi^(k) = phi * G_k(u); G_0 = 1, G_{k+1} = u (G_k - G_k').
inline const IPoly& gompertz_poly(int k) {
    static std::vector<IPoly> table = {{1}};
    while (static_cast<int>(table.size()) <= k) {
        const IPoly& g = table.back();
        IPoly d = ipoly_derivative(g);
        IPoly next(g.size() + 1, 0);
        for (size_t i = 0; i < g.size(); ++i) next[i + 1] += g[i];
        for (size_t i = 0; i < d.size(); ++i) next[i + 1] -= d[i];
        table.push_back(std::move(next));
    }
    return table[k];
}

}  // namespace detail

enum class ActKind { logistic, tanh_shifted, arctan_shifted, gompertz, identity };

inline std::string act_kind_name(ActKind k) {
    switch (k) {
        case ActKind::logistic: return "logistic";
        case ActKind::tanh_shifted: return "tanh-shifted";
        case ActKind::arctan_shifted: return "arctan-shifted";
        case ActKind::gompertz: return "gompertz";
        case ActKind::identity: return "identity";
    }
    throw argument_error("bad activation kind");
}

inline ActKind act_kind_from_name(const std::string& name) {
    if (name == "logistic") return ActKind::logistic;
    if (name == "tanh-shifted") return ActKind::tanh_shifted;
    if (name == "arctan-shifted") return ActKind::arctan_shifted;
    if (name == "gompertz") return ActKind::gompertz;
    if (name == "identity") return ActKind::identity;
    throw argument_error("unknown activation name '" + name + "'");
}

struct Activation {
    ActKind kind = ActKind::logistic;
    double theta0 = 0.0;
    int max_derivative_order = 10;
    double output_scale = 1.0;  // 1 for the named activations; tests may perturb

    std::string name() const { return act_kind_name(kind); }

    Real value(const Real& t) const { return derivative_impl(0, t); }

    Real derivative(int k, const Real& t) const {
        if (k < 0) throw argument_error("derivative order must be >= 0");
        if (k > max_derivative_order)
            throw unsupported_order_error("derivative order " + std::to_string(k) +
                                          " exceeds max_derivative_order " +
                                          std::to_string(max_derivative_order));
        return derivative_impl(k, t);
    }

    Real anchor(unsigned prec) const { return Real(theta0, prec); }

  private:
    Real derivative_impl(int k, const Real& t) const {
        if (k > kMaxSupportedDerivOrder)
            throw unsupported_order_error("derivative tables stop at order " +
                                          std::to_string(kMaxSupportedDerivOrder));
        const unsigned prec = t.precision_bits();
        Real r(prec);
        switch (kind) {
            case ActKind::identity:
                if (k == 0)
                    r = t;
                else if (k == 1)
                    r = Real(1.0, prec);
                else
                    r = Real(prec);
                break;
            case ActKind::logistic: {
                Real s = 1.0 / (1.0 + exp(-t));
                r = detail::ipoly_eval(detail::logistic_poly(k), s);
                break;
            }
            case ActKind::tanh_shifted: {
                Real s = 1.0 / (1.0 + exp(t * -2.0));
                Real scale(prec);
                mpfr_set_ui_2exp(scale.raw(), 1, k, MPFR_RNDN);
                r = scale * detail::ipoly_eval(detail::logistic_poly(k), s);
                break;
            }
            case ActKind::arctan_shifted: {
                if (k == 0) {
                    r = atan(t) / pi(prec) + 0.5;
                } else {
                    Real denom = pow(1.0 + t * t, static_cast<long>(k));
                    r = detail::ipoly_eval(detail::arctan_poly(k), t) / (pi(prec) * denom);
                }
                break;
            }
            case ActKind::gompertz: {
                Real u = exp(-t);
                Real phi = exp(-u);
                r = (k == 0) ? phi : phi * detail::ipoly_eval(detail::gompertz_poly(k), u);
                break;
            }
        }
        return output_scale == 1.0 ? r : r * output_scale;
    }
};

inline Real eval_derivative(const Activation& act, int k, const Real& t) {
    return act.derivative(k, t);
}

// sup_{t >= A} max(|1-phi(t)|, |phi(-t)|); the four named activations are
// monotone, so the sup is attained at t = A.
inline Real delta_phi(const Activation& act, const Real& A) {
    if (A < 0.0) throw argument_error("delta_phi: A >= 0 required");
    Real one(1.0, A.precision_bits());
    return max(abs(one - act.value(A)), abs(act.value(-A)));
}

// Deterministic anchor search: scan [-3, 3] in 1e-2 steps for the smallest
// |theta| with min_{j<=s0} |phi^(j)(theta)| >= tol, then refine locally by
// ternary search on the same objective (kept only if it improves).
inline Real find_theta0(const Activation& act, int s0, const Real& tol) {
    if (!(tol > Real(0.0, tol.precision_bits()))) throw argument_error("find_theta0: tol > 0 required");
    if (s0 < 0) throw argument_error("find_theta0: s0 >= 0 required");
    const unsigned prec = tol.precision_bits();

    auto margin = [&](double theta) {
        Real t(theta, prec);
        Real m = abs(act.derivative(0, t));
        for (int j = 1; j <= s0; ++j) m = min(m, abs(act.derivative(j, t)));
        return m;
    };

    double best_theta = 0.0;
    Real best_margin(-1.0, prec);
    bool found = false;
    double fail_best_theta = 0.0;
    Real fail_best_margin(-1.0, prec);
    for (int i = 0; i <= 600; ++i) {
        double theta = -3.0 + 0.01 * i;
        if (i == 300) theta = 0.0;
        Real m = margin(theta);
        if (m >= tol) {
            if (!found || std::abs(theta) < std::abs(best_theta) - 1e-12) {
                best_theta = theta;
                best_margin = m;
                found = true;
            }
        } else if (m > fail_best_margin) {
            fail_best_margin = m;
            fail_best_theta = theta;
        }
    }
    if (!found)
        throw search_failure_error("no anchor in [-3,3] with derivative margin >= tol; best was theta=" +
                                   std::to_string(fail_best_theta) + " margin=" +
                                   fail_best_margin.to_string());

    double lo = best_theta - 0.01, hi = best_theta + 0.01;
    for (int it = 0; it < 60; ++it) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (margin(m1) < margin(m2))
            lo = m1;
        else
            hi = m2;
    }
    double refined = 0.5 * (lo + hi);
    Real rm = margin(refined);
    if (rm > best_margin && rm >= tol) return Real(refined, prec);
    return Real(best_theta, prec);
}

struct AssumptionReport {
    Real theta0;
    Real min_abs_derivative;
    Real tail_constant;       // max over sampled A of A * delta(A)
    double tail_exponent = 0.0;  // fitted decay exponent of delta(A)
    bool satisfied = false;
    std::vector<std::string> violations;
};

inline AssumptionReport validate_assumptions(const Activation& act, double r0,
                                             unsigned prec = kDefaultPrecision) {
    const int s0 = static_cast<int>(std::ceil(r0)) - 1;
    if (s0 < 2) throw argument_error("validate_assumptions: r0 = s0 + v0 with s0 >= 2 required");
    AssumptionReport rep{Real(act.theta0, prec), Real(prec), Real(prec)};

    GridSpec wide{-50.0, 50.0, 4001, GridKind::uniform};
    Real sup_phi(prec), sup_dphi(prec);
    for (const Real& t : wide.points(prec)) {
        sup_phi = max(sup_phi, abs(act.value(t)));
        sup_dphi = max(sup_dphi, abs(act.derivative(1, t)));
    }
    if (sup_phi > 1.0 + 1e-12) rep.violations.push_back("sup |phi| = " + std::to_string(sup_phi.to_double()) + " exceeds 1");
    if (sup_dphi > 1.0 + 1e-12) rep.violations.push_back("sup |phi'| = " + std::to_string(sup_dphi.to_double()) + " exceeds 1");

    Real anchor(act.theta0, prec);
    rep.min_abs_derivative = abs(act.value(anchor));
    for (int j = 1; j <= s0; ++j) rep.min_abs_derivative = min(rep.min_abs_derivative, abs(act.derivative(j, anchor)));
    if (!(rep.min_abs_derivative > 1e-12))
        rep.violations.push_back("derivative of order <= " + std::to_string(s0) + " vanishes at theta0");

    std::vector<double> logA, logD;
    Real tail_c(prec);
    for (double A : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
        Real d = delta_phi(act, Real(A, prec));
        tail_c = max(tail_c, Real(A, prec) * d);
        double dv = d.to_double();
        if (dv > 0) {
            logA.push_back(std::log(A));
            logD.push_back(std::log(dv));
        }
    }
    rep.tail_constant = tail_c;
    rep.tail_exponent = logA.size() >= 2 ? -fit_slope(logA, logD) : 1e9;
    if (rep.tail_exponent < 0.9)
        rep.violations.push_back("tail delta(A) decays slower than O(1/A): exponent " +
                                 std::to_string(rep.tail_exponent));
    Real far = act.value(Real(64.0, prec));
    if (abs(far - 1.0) > 0.5) rep.violations.push_back("phi(t) does not approach 1");
    if (abs(act.value(Real(-64.0, prec))) > 0.5) rep.violations.push_back("phi(-t) does not approach 0");

    rep.satisfied = rep.violations.empty();
    return rep;
}

// Activation with its anchor chosen for the given derivative order budget.
inline Activation make_activation(const std::string& name, int max_order = 10,
                                  unsigned prec = kDefaultPrecision, double tol = 1e-6) {
    Activation a{act_kind_from_name(name), 0.0, max_order};
    if (a.kind == ActKind::identity) return a;
    a.theta0 = find_theta0(a, max_order, Real(tol, prec)).to_double();
    return a;
}

}  // namespace radnet
