#pragma once

// Exchange machinery between polynomials and shallow nets:
//   - replace the leading monomial of a polynomial by one neuron plus a
//     lower-degree remainder without degrading the sup error on [-1,1],
//   - convert a full degree-k polynomial to a (k+1)-term shallow net,
//   - a three-neuron product gate for (U,U') -> U*U' on [-1,1]^2,
//   - the integral-form Taylor remainder used as a test oracle.

#include "radnet/activation.hpp"
#include "radnet/numeric.hpp"
#include "radnet/polynomial.hpp"
#include "radnet/real.hpp"
#include "radnet/shallow.hpp"

#include <map>
#include <tuple>
#include <vector>

namespace radnet {

// Scanned max of |phi^(k)| over [theta0 - 1, theta0 + 1], times a 1.1 safety
// factor.  Cached: the scan is 1e4 derivative evaluations.
inline Real scanned_derivative_max(const Activation& act, int k, double theta0, unsigned prec) {
    static std::map<std::tuple<ActKind, int, double, unsigned>, Real> cache;
    auto key = std::make_tuple(act.kind, k, theta0, prec);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    GridSpec grid{theta0 - 1.0, theta0 + 1.0, 10000, GridKind::uniform};
    Real m(prec);
    for (const Real& t : grid.points(prec)) m = max(m, abs(act.derivative(k, t)));
    m *= 1.1;
    cache.emplace(key, m);
    return m;
}

// The neuron slope mu_k: small enough that the Taylor remainder of
// phi(mu_k t + theta0) stays below eps, never larger than 1.
inline Real mu_k(const Activation& act, const Real& theta0, int k, const Real& u_k, const Real& eps,
                 int s0, double v0, const Real& c0) {
    if (k < 0 || k > s0) throw unsupported_order_error("mu_k: k must be in [0, s0]");
    if (u_k.is_zero()) throw argument_error("mu_k: u_k must be nonzero");
    const unsigned prec = eps.precision_bits();
    Real one(1.0, prec);
    Real phik = abs(act.derivative(k, theta0));
    if (k <= s0 - 1) {
        Real m = scanned_derivative_max(act, k + 1, theta0.to_double(), prec);
        return min(one, eps * phik * Real(static_cast<long>(k + 1), prec) / (abs(u_k) * m));
    }
    // k == s0: Hoelder branch with the Gamma-function constant
    Real s0r(static_cast<long>(s0), prec), v0r(v0, prec);
    Real num = eps * phik * gamma(s0r + v0r + 1.0);
    Real den = gamma(s0r + 1.0) * gamma(v0r + 1.0) * c0 * abs(u_k);
    return min(one, pow(num / den, one / v0r));
}

namespace detail {

// Effective smoothness order used when callers do not specify one: the
// largest s0 for which phi^(s0+1) is still available for the mu_k scan.
inline int effective_s0(const Activation& act) { return act.max_derivative_order - 1; }

inline Real effective_c0(const Activation& act, unsigned prec) {
    // Lipschitz bound for phi^(s0) near theta0 (v0 = 1 branch).
    return scanned_derivative_max(act, effective_s0(act) + 1, act.theta0, prec);
}

}  // namespace detail

struct LeadingReplacement {
    ShallowTerm neuron;
    Poly remainder;
};

// One step of the exchange: p_k -> single neuron + polynomial of degree k-1,
// with sup error <= eps on [-1, 1].
inline LeadingReplacement replace_leading(const Poly& p, const Activation& act, const Real& theta0,
                                          const Real& eps) {
    if (p.is_zero()) throw argument_error("replace_leading: zero polynomial (strip it first)");
    if (!(eps > 0.0) || eps >= 1.0) throw argument_error("replace_leading: eps in (0,1) required");
    const unsigned prec = eps.precision_bits();
    const int k = p.degree();
    const int s0 = detail::effective_s0(act);
    if (k > s0)
        throw unsupported_order_error("replace_leading: degree " + std::to_string(k) +
                                      " exceeds the activation's usable smoothness " + std::to_string(s0));
    const Real u_k = p.leading();
    const Real mu = mu_k(act, theta0, k, u_k, eps, s0, 1.0, detail::effective_c0(act, prec));

    // factorials up to k
    std::vector<Real> fact(k + 1, Real(1.0, prec));
    for (int i = 1; i <= k; ++i) fact[i] = fact[i - 1] * Real(static_cast<long>(i), prec);

    Real phik = act.derivative(k, theta0);
    Real outer = u_k * fact[k] / (pow(mu, static_cast<long>(k)) * phik);
    ShallowTerm neuron{outer, mu, theta0};

    std::vector<Real> rem(k, Real(prec));
    for (int i = 0; i < k; ++i) {
        Real adj = u_k * fact[k] * act.derivative(i, theta0) /
                   (phik * pow(mu, static_cast<long>(k - i)) * fact[i]);
        Real ui = (i <= p.degree()) ? p.coeff(i) : Real(prec);
        rem[i] = ui - adj;
    }
    return {neuron, Poly(std::move(rem), prec)};
}

// Full conversion: degree-k polynomial -> shallow net with <= k+1 terms and
// sup error <= eps on [-1, 1].  Iterates replace_leading with a per-step
// budget of eps/(k+1); coefficients below 2^{-prec/2} are treated as zero.
inline ShallowNet1D poly_to_shallow(const Poly& p, const Activation& act, const Real& theta0,
                                    const Real& eps) {
    if (!(eps > 0.0) || eps >= 1.0) throw argument_error("poly_to_shallow: eps in (0,1) required");
    const unsigned prec = eps.precision_bits();
    Real tiny(prec);
    mpfr_set_ui_2exp(tiny.raw(), 1, -static_cast<long>(prec / 2), MPFR_RNDN);

    ShallowNet1D net{act, {}};
    Poly cur = p.stripped(tiny);
    if (cur.is_zero()) return net;
    const int k = cur.degree();
    if (k > detail::effective_s0(act))
        throw unsupported_order_error("poly_to_shallow: degree " + std::to_string(k) +
                                      " exceeds the activation's usable smoothness");
    Real step_budget = eps / Real(static_cast<long>(k + 1), prec);
    while (!cur.is_zero()) {
        LeadingReplacement rep = replace_leading(cur, act, theta0, step_budget);
        net.terms.push_back(rep.neuron);
        cur = rep.remainder.stripped(tiny);
    }
    return net;
}

// Three-neuron gate realizing (U, U') -> U*U' on [-1,1]^2 within eps, via a
// shallow approximation of t^2 and the polarization identity.
struct ProductGate {
    ShallowNet1D h3;
    Real eps;

    Real combine(const Real& U, const Real& Up) const {
        return 2.0 * h3.eval((U + Up) / 2.0) - h3.eval(U) / 2.0 - h3.eval(Up) / 2.0;
    }
};

inline ProductGate make_product_gate(const Activation& act, const Real& theta0, const Real& eps) {
    const unsigned prec = eps.precision_bits();
    Poly tsq = Poly::monomial(2, Real(1.0, prec));
    return ProductGate{poly_to_shallow(tsq, act, theta0, eps / 3.0), eps};
}

// Integral-form Taylor remainder r_ell(t) about t0, computed by quadrature:
// (1/(ell-1)!) * int_{t0}^{t} [psi^(ell)(u) - psi^(ell)(t0)] (t-u)^{ell-1} du.
inline Real taylor_remainder(const RealFn& psi_ell, int ell, const Real& t0, const Real& t,
                             long n_panels = 2048) {
    if (ell < 1) throw unsupported_order_error("taylor_remainder: ell >= 1 required");
    const unsigned prec = t.precision_bits();
    Real base = psi_ell(t0);
    Real integral = quadrature(
        [&](const Real& u) { return (psi_ell(u) - base) * pow(t - u, static_cast<long>(ell - 1)); },
        t0, t, n_panels);
    Real fact(1.0, prec);
    for (int i = 2; i <= ell - 1; ++i) fact *= Real(static_cast<long>(i), prec);
    return integral / fact;
}

}  // namespace radnet
