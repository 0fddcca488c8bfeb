#pragma once

// Localized Taylor-bump approximation on J = [0, 1/2] and the two-hidden-
// layer net built from it.
//
// The operator stage mirrors the classic localized construction: nodes
// t_j = j/(2n), sigmoid edges e_j(t) = phi(-4An(t - t_j) + A), bumps
// b_j = e_j - e_{j-1}, and Phi(t) = sum_j T_j(t) b_j(t) with T_j the Taylor
// polynomial of g at t_j.
//
// The network stage rewrites Phi by partial summation as
//     Phi = sum_{j<n} (T_j - T_{j+1}) e_j + T_n e_n
// and realizes each product (T_j - T_{j+1}) * e_j with THREE outer neurons
// through a second-order finite-difference product gate
//     U V ~ [phi(t0 + c(U+V)) - phi(t0 + cU) - phi(t0 + cV) + phi(t0)]
//           / (c^2 phi''(t0)),
// whose phi(t0) corrections accumulate on one shared constant neuron.  The
// final patch T_n e_n is realized directly (e_n = 1 + O(delta(A)) on J)
// from s+1 outer neurons fed by a two-neuron identity approximation.  The
// result has hidden widths exactly s+3 and 3n+3, biases bounded by
// 1 + 3An + |theta0|, inner weights bounded by 4An, and sup error
//     |g - H| <= C4 (n delta(A) + n^{-r} + n eps).

#include "radnet/activation.hpp"
#include "radnet/numeric.hpp"
#include "radnet/poly_bridge.hpp"
#include "radnet/polynomial.hpp"
#include "radnet/real.hpp"
#include "radnet/tree_net.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace radnet {

struct UnivariateTarget {
    // deriv(t, k) = g^(k)(t); valid for k <= s
    std::function<Real(const Real&, int)> deriv;
    int s = 0;
    double v = 1.0;   // r = s + v, v in (0, 1]
    double c0 = 1.0;  // Hoelder constant of g^(s)
    double lo = 0.0;
    double hi = 0.5;
    double sup_hint = -1.0;  // known sup-norm bound, < 0 to estimate by scan

    double r() const { return s + v; }
    Real g(const Real& t) const { return deriv(t, 0); }

    Real sup_norm(unsigned prec) const {
        if (sup_hint >= 0.0) return Real(sup_hint, prec);
        GridSpec grid{lo, hi, 10000, GridKind::uniform};
        Real m(prec);
        for (const Real& t : grid.points(prec)) m = max(m, abs(g(t)));
        return m;
    }
};

// Finite-sample Hoelder check of g^(s): max |g_s(t)-g_s(t')| / |t-t'|^v.
inline Real sampled_holder_constant(const UnivariateTarget& t, long pairs, std::uint64_t seed,
                                    unsigned prec) {
    Rng rng(seed);
    Real worst(prec);
    for (long i = 0; i < pairs; ++i) {
        Real a = rng.uniform_real(t.lo, t.hi, prec), b = rng.uniform_real(t.lo, t.hi, prec);
        if (a == b) continue;
        Real num = abs(t.deriv(a, t.s) - t.deriv(b, t.s));
        Real den = pow(abs(a - b), Real(t.v, prec));
        worst = max(worst, num / den);
    }
    return worst;
}

struct BumpSystem {
    double A = 1.0;
    int n = 1;

    void validate() const {
        if (A < 1.0) throw argument_error("BumpSystem: A >= 1 required");
        if (n < 1) throw argument_error("BumpSystem: n >= 1 required");
    }

    Real node(int j, unsigned prec) const { return Real(static_cast<long>(j), prec) / (2.0 * n); }

    // Edge function e_j(t) = phi(-4An(t - t_j) + A).
    Real edge(const Activation& act, int j, const Real& t) const {
        const unsigned prec = t.precision_bits();
        Real arg = Real(-4.0 * A * n, prec) * (t - node(j, prec)) + Real(A, prec);
        return act.value(arg);
    }
};

// b_{A,j}(t): e_0 for j = 0, else e_j - e_{j-1}; |b| <= 2 everywhere.
inline Real bump(const BumpSystem& sys, const Activation& act, int j, const Real& t) {
    sys.validate();
    if (j < 0 || j > sys.n) throw argument_error("bump: j must be in [0, n]");
    if (j == 0) return sys.edge(act, 0, t);
    return sys.edge(act, j, t) - sys.edge(act, j - 1, t);
}

// Taylor polynomial of g at t_j, evaluated at t.
inline Real taylor_at_node(const UnivariateTarget& target, int s, const Real& t_j, const Real& t) {
    const unsigned prec = t.precision_bits();
    Real sum(prec), fact(1.0, prec), power(1.0, prec);
    for (int i = 0; i <= s; ++i) {
        if (i > 0) {
            fact *= Real(static_cast<long>(i), prec);
            power *= (t - t_j);
        }
        sum += target.deriv(t_j, i) * power / fact;
    }
    return sum;
}

// Phi_{n,s,g,A}(t) = sum_j T_j(t) b_j(t).
inline Real phi_operator(const UnivariateTarget& target, int n, int s, double A,
                         const Activation& act, const Real& t) {
    BumpSystem sys{A, n};
    sys.validate();
    const unsigned prec = t.precision_bits();
    Real sum(prec);
    for (int j = 0; j <= n; ++j)
        sum += taylor_at_node(target, s, sys.node(j, prec), t) * bump(sys, act, j, t);
    return sum;
}

// Sup-error constant of the operator stage: 2(c0'(1+||phi||)/s! + ||g||).
inline Real phi_operator_constant(const UnivariateTarget& target, unsigned prec) {
    Real fact(1.0, prec);
    for (int i = 2; i <= target.s; ++i) fact *= Real(static_cast<long>(i), prec);
    return 2.0 * (Real(target.c0, prec) * 2.0 / fact + target.sup_norm(prec));
}

// ---------------------------------------------------------------------------
// network construction
// ---------------------------------------------------------------------------

// One outer node: contributes outer_a * phi(sum_i coef_i phi(w_i t + b_i) + bias).
struct OuterNodeSpec {
    Real outer_a;
    Real bias;
    struct Child {
        Real coef;
        Real w;
        Real b;
    };
    std::vector<Child> children;
};

struct UnivariateParts {
    std::vector<OuterNodeSpec> tops;  // exactly 3n+3 entries, zero-padded
    int n = 0;         // width parameter: outer layer has 3n+3 nodes
    int m_active = 0;  // bump intervals actually used (m = n unless s > 1)
    int s = 0;
    double A = 1.0;
    double theta0 = 0.0;
    unsigned prec = kDefaultPrecision;
    Real eps, eps1, eps2, gate_step, B1, C3, C4;
    Real lip_bound;        // Lipschitz bound of the net as a function of t
    Real max_abs_weight;
    Real error_bound;      // C4 (m delta(A) + m^{-r} + m eps)

    Real eval(const Activation& act, const Real& t) const {
        Real sum(t.precision_bits());
        for (const auto& top : tops) {
            if (top.outer_a.is_zero()) continue;
            Real inner(t.precision_bits());
            for (const auto& c : top.children) inner += c.coef * act.value(c.w * t + c.b);
            sum += top.outer_a * act.value(inner + top.bias);
        }
        return sum;
    }
};

struct UnivariateBuildOptions {
    unsigned precision_bits = kDefaultPrecision;
    unsigned precision_ceiling = 4096;
    bool allow_rescale_for_large_s = true;  // shrink bump count when s > 1
};

namespace detail {

inline Real factorial_real(int k, unsigned prec) {
    Real f(1.0, prec);
    for (int i = 2; i <= k; ++i) f *= Real(static_cast<long>(i), prec);
    return f;
}

// Taylor polynomial of g at t_j as a Poly in tau = t - t_j.
inline Poly taylor_poly(const UnivariateTarget& g, const Real& t_j, unsigned prec) {
    std::vector<Real> c;
    for (int i = 0; i <= g.s; ++i) c.push_back(g.deriv(t_j, i) / factorial_real(i, prec));
    return Poly(std::move(c), prec);
}

inline UnivariateParts build_univariate_parts_at(const UnivariateTarget& g, int n, double A,
                                                 const Real& eps, const Activation& act,
                                                 unsigned prec) {
    if (n < 1) throw argument_error("build_univariate_net: n >= 1 required");
    if (A < 1.0) throw argument_error("build_univariate_net: A >= 1 required");
    if (!(eps > 0.0) || eps > 1.0) throw argument_error("build_univariate_net: eps in (0,1] required");
    const int s = g.s;
    if (s > detail::effective_s0(act))
        throw unsupported_order_error("target smoothness s exceeds the activation's usable order");

    UnivariateParts parts;
    parts.n = n;
    parts.s = s;
    parts.A = A;
    parts.theta0 = act.theta0;
    parts.prec = prec;
    parts.eps = Real(eps.to_double(), prec);

    int m = n;
    while (3 * m + s + 2 > 3 * n + 3) --m;
    if (m < 1) throw argument_error("build_univariate_net: width budget too small for s");
    parts.m_active = m;

    const Real theta0 = act.anchor(prec);
    const Real sup_g = g.sup_norm(prec);
    const Real c0p(g.c0, prec);
    parts.B1 = 4.0 * (sup_g + c0p + 2.0);
    parts.C3 = phi_operator_constant(g, prec);
    parts.C4 = 2.0 * (parts.C3 + parts.B1) + 1.0;

    // finite-difference gate step
    const Real phi2 = act.derivative(2, theta0);
    const Real M3 = scanned_derivative_max(act, 3, act.theta0, prec);
    parts.gate_step = min(Real(0.5, prec), parts.eps * abs(phi2) / (4.0 * M3));
    const Real h = parts.gate_step;
    const Real gate_outer = parts.B1 / (h * h * phi2);

    parts.eps1 = pow(parts.eps, 7L) / 4.0;

    BumpSystem sys{A, m};
    const Real wV(-4.0 * A * m, prec);

    auto taylor_at = [&](int j) { return taylor_poly(g, sys.node(j, prec), prec); };

    Poly t_cur = taylor_at(0);
    const Real delta = Real(1.0, prec) / (2.0 * m);
    for (int j = 0; j < m; ++j) {
        Poly t_next = taylor_at(j + 1);
        // T_{j+1} recentered to tau = t - t_j: substitute tau - delta
        Poly d_j = t_cur - t_next.recentered(-delta);
        ShallowNet1D hj = poly_to_shallow(d_j.scaled(1.0 / parts.B1), act, theta0, parts.eps1);

        const Real t_j = sys.node(j, prec);
        const Real bV = Real(A, prec) - wV * t_j;  // phi(wV t + bV) = e_j(t)

        // gate nodes share the step h; node 1 sees U+V, node 2 sees U, node 3 sees V
        OuterNodeSpec n1{gate_outer, theta0, {}};
        for (const auto& term : hj.terms)
            n1.children.push_back({h * term.a, term.w, theta0 - term.w * t_j});
        n1.children.push_back({h, wV, bV});

        OuterNodeSpec n2{-gate_outer, theta0, {}};
        for (const auto& term : hj.terms)
            n2.children.push_back({h * term.a, term.w, theta0 - term.w * t_j});

        OuterNodeSpec n3{-gate_outer, theta0, {}};
        n3.children.push_back({h, wV, bV});

        parts.tops.push_back(std::move(n1));
        parts.tops.push_back(std::move(n2));
        parts.tops.push_back(std::move(n3));
        t_cur = std::move(t_next);
    }

    // Final patch: realize T_m directly through an identity pair.
    {
        const Real t_m = sys.node(m, prec);
        ShallowNet1D tm = poly_to_shallow(t_cur.scaled(1.0 / parts.B1), act, theta0, parts.eps1);
        Real amp(1.0, prec);
        for (const auto& term : tm.terms) amp += abs(term.a);
        parts.eps2 = min(parts.eps1 / amp, Real(0.25, prec));
        ShallowNet1D ident =
            poly_to_shallow(Poly::monomial(1, Real(1.0, prec)), act, theta0, parts.eps2);
        for (const auto& term : tm.terms) {
            OuterNodeSpec node{parts.B1 * term.a, theta0, {}};
            for (const auto& id : ident.terms)
                node.children.push_back({term.w * id.a, id.w, theta0 - id.w * t_m});
            parts.tops.push_back(std::move(node));
        }
        // shared constant neuron collecting the gate's phi(theta0) corrections
        OuterNodeSpec cnode{gate_outer * Real(static_cast<long>(m), prec), theta0, {}};
        parts.tops.push_back(std::move(cnode));
    }

    // zero-pad the outer layer to exactly 3n+3 nodes
    while (static_cast<int>(parts.tops.size()) < 3 * n + 3)
        parts.tops.push_back(OuterNodeSpec{Real(prec), Real(prec), {}});
    if (static_cast<int>(parts.tops.size()) != 3 * n + 3)
        throw construction_error("internal: outer width overflow");

    Real lip(prec), maxw(prec);
    for (const auto& top : parts.tops) {
        Real inner_lip(prec);
        maxw = max(maxw, max(abs(top.outer_a), abs(top.bias)));
        for (const auto& c : top.children) {
            inner_lip += abs(c.coef * c.w);
            maxw = max(maxw, max(abs(c.coef), max(abs(c.w), abs(c.b))));
        }
        lip += abs(top.outer_a) * inner_lip;
    }
    parts.lip_bound = lip;
    parts.max_abs_weight = maxw;

    const Real mr(static_cast<long>(m), prec);
    parts.error_bound = parts.C4 * (mr * delta_phi(act, Real(A, prec)) +
                                    pow(mr, Real(-g.r(), prec)) + mr * parts.eps);
    return parts;
}

inline unsigned required_bits(const Real& max_coef, const Real& eps) {
    double lc = std::max(1.0, std::log2(std::max(2.0, max_coef.to_double())));
    double le = std::max(1.0, std::log2(std::max(2.0, 1.0 / eps.to_double())));
    return static_cast<unsigned>(std::ceil(lc + le)) + 64;
}

}  // namespace detail

// Builds the IR, re-running at higher precision when the preflight magnitude
// check fails the requested working precision.
inline UnivariateParts build_univariate_parts(const UnivariateTarget& g, int n, double A,
                                              double eps, const Activation& act,
                                              const UnivariateBuildOptions& opt = {}) {
    unsigned prec = opt.precision_bits;
    for (int attempt = 0; attempt < 4; ++attempt) {
        UnivariateParts parts =
            detail::build_univariate_parts_at(g, n, A, Real(eps, prec), act, prec);
        unsigned need = detail::required_bits(parts.max_abs_weight, parts.eps);
        if (need <= prec) return parts;
        unsigned next = ((need + 63) / 64) * 64;
        if (next > opt.precision_ceiling)
            throw precision_error("construction needs " + std::to_string(next) +
                                  " mantissa bits, above the ceiling of " +
                                  std::to_string(opt.precision_ceiling));
        prec = next;
    }
    throw precision_error("precision preflight did not converge");
}

// Assemble the IR into an L=2 tree with widths (1, s+3, 3n+3) and layer
// activations (identity, phi, phi).
inline TreeNet assemble_univariate(const UnivariateParts& parts, const Activation& act) {
    TreeArch arch{2,
                  {1, parts.s + 3, 3 * parts.n + 3},
                  {ActKind::identity, act.kind, act.kind},
                  act.theta0};
    TreeNet net(arch, parts.prec);
    const Real one(1.0, parts.prec);
    const Real zero(parts.prec);
    for (size_t q = 0; q < parts.tops.size(); ++q) {
        const auto& top = parts.tops[q];
        net.set_node(2, static_cast<long>(q), top.outer_a, top.bias);
        for (int i = 0; i < parts.s + 3; ++i) {
            long idx = net.node_index(1, i, static_cast<long>(q));
            if (i < static_cast<int>(top.children.size())) {
                const auto& c = top.children[i];
                net.set_node(1, idx, c.coef, c.b);
                net.set_leaf(net.leaf_index(0, idx), one, c.w, zero);
            } else {
                net.set_node(1, idx, zero, zero);
                net.set_leaf(net.leaf_index(0, idx), zero, zero, zero);
            }
        }
    }
    net.metadata = {{"builder", "univariate"},
                    {"n", parts.n},
                    {"m_active", parts.m_active},
                    {"A", parts.A},
                    {"eps", parts.eps.to_double()},
                    {"eps1", parts.eps1.to_double()},
                    {"eps2", parts.eps2.to_double()},
                    {"precision_bits", parts.prec}};
    return net;
}

struct UnivariateBuild {
    TreeNet net;
    UnivariateParts parts;
};

inline UnivariateBuild build_univariate_net(const UnivariateTarget& g, int n, double A, double eps,
                                            const Activation& act,
                                            const UnivariateBuildOptions& opt = {}) {
    UnivariateParts parts = build_univariate_parts(g, n, A, eps, act, opt);
    TreeNet net = assemble_univariate(parts, act);
    return {std::move(net), std::move(parts)};
}

}  // namespace radnet
