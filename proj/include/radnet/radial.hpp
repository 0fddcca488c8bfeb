#pragma once

// Four-layer nets for radial targets f(x) = g(|x|^2) on the unit ball.
//
// Stage 1 approximates |x|^2/2 coordinatewise from a 3-term shallow square
// net; stage 2 re-expresses that sum through the same activation with a
// 2-neuron identity approximation, giving the width-6 subnet h6d with
// | |x|^2/2 - h6d(x) | <= (d+2) eps1 / 2 and ||h6d|| <= 1 on the ball;
// stage 3 grafts h6d under every leaf of the two-hidden-layer univariate
// net for g(2 .), built at A = n^{r+1}, eps = n^{-(r+1)}.  The result has
// widths (d, 6, s+3, 3n+3) and sup error O(n^{-r}).

#include "radnet/activation.hpp"
#include "radnet/poly_bridge.hpp"
#include "radnet/real.hpp"
#include "radnet/rng.hpp"
#include "radnet/tree_net.hpp"
#include "radnet/univariate.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace radnet {

struct RadialTarget {
    UnivariateTarget g;  // on [0, 1]
    int d = 2;

    double r() const { return g.r(); }

    Real eval(const std::vector<Real>& x) const {
        if (static_cast<int>(x.size()) != d) throw argument_error("RadialTarget: dimension mismatch");
        Real t(x[0].precision_bits());
        for (const Real& xi : x) t += xi * xi;
        return g.g(t);
    }
};

// Stage 1: h3d(x) = sum_l h3(x_l)/2 with h3 ~ t^2 within eps1 on [-1,1].
struct SquareStage {
    ShallowNet1D h3;
    Real eps1;
    Real magnitude;  // recorded bound B >= 1 on each activation group

    Real eval(const std::vector<Real>& x) const {
        Real s(x[0].precision_bits());
        for (const Real& xi : x) s += h3.eval(xi);
        return s / 2.0;
    }
};

inline SquareStage build_square_net(int d, const Real& eps1, const Activation& act) {
    if (d < 1) throw argument_error("build_square_net: d >= 1 required");
    if (!(eps1 > 0.0) || eps1 > 1.0 / (d + 2))
        throw argument_error("build_square_net: eps1 in (0, 1/(d+2)] required");
    const unsigned prec = eps1.precision_bits();
    ShallowNet1D h3 = poly_to_shallow(Poly::monomial(2, Real(1.0, prec)), act, act.anchor(prec), eps1);
    Real B = max(Real(1.0, prec), Real(static_cast<long>(d), prec) * h3.max_abs_outer() / 2.0);
    return SquareStage{std::move(h3), eps1, B};
}

// Stage 2: width-6 subnet with all nonlinearities expressed through phi.
// Node k: out_coef[k] * phi( sum_l leaf_coef[k] phi(leaf_w[k] x_l + theta0) + theta0 ).
struct UnifiedSquare {
    std::vector<Real> out_coef, leaf_coef, leaf_w;  // size 6 after padding
    double theta0 = 0.0;
    int d = 2;
    Real eps1, eps2, magnitude;

    Real eval_with(const Activation& act, const std::vector<Real>& x) const {
        const unsigned prec = x[0].precision_bits();
        Real th(theta0, prec);
        Real sum(prec);
        for (size_t k = 0; k < out_coef.size(); ++k) {
            if (out_coef[k].is_zero()) continue;
            Real inner(prec);
            for (const Real& xi : x) inner += leaf_coef[k] * act.value(leaf_w[k] * xi + th);
            sum += out_coef[k] * act.value(inner + th);
        }
        return sum;
    }
};

inline UnifiedSquare unify_activation(const SquareStage& sq, int d, const Activation& act) {
    const unsigned prec = sq.eps1.precision_bits();
    const Real theta0 = act.anchor(prec);
    UnifiedSquare u;
    u.theta0 = act.theta0;
    u.d = d;
    u.eps1 = sq.eps1;
    u.magnitude = sq.magnitude;
    u.eps2 = sq.eps1 / (3.0 * sq.magnitude);
    ShallowNet1D ident = poly_to_shallow(Poly::monomial(1, Real(1.0, prec)), act, theta0, u.eps2);
    for (const auto& sqterm : sq.h3.terms)
        for (const auto& idterm : ident.terms) {
            u.out_coef.push_back(sq.magnitude * idterm.a);
            u.leaf_coef.push_back(idterm.w * sqterm.a / (2.0 * sq.magnitude));
            u.leaf_w.push_back(sqterm.w);
        }
    if (u.out_coef.size() > 6) throw construction_error("unify_activation: more than 6 nodes");
    while (u.out_coef.size() < 6) {
        u.out_coef.push_back(Real(prec));
        u.leaf_coef.push_back(Real(prec));
        u.leaf_w.push_back(Real(prec));
    }
    return u;
}

struct BuildReport {
    int n = 0;
    int d = 0;
    double r = 0.0;
    double A = 0.0;
    double eps = 0.0;    // univariate-stage budget
    double eps1 = 0.0;   // square-stage budget
    double eps2 = 0.0;   // unification budget
    double max_abs_weight = 0.0;
    long param_count = 0;
    double measured_sup_error = 0.0;
    unsigned precision_bits = 0;

    nlohmann::ordered_json to_json() const {
        return {{"n", n},
                {"d", d},
                {"r", r},
                {"A", A},
                {"eps_cascade", {{"eps", eps}, {"eps1", eps1}, {"eps2", eps2}}},
                {"max_abs_weight", max_abs_weight},
                {"param_count", param_count},
                {"measured_sup_error", measured_sup_error},
                {"precision_bits", precision_bits}};
    }
};

// Graft the unified square subnet under every leaf of the univariate IR.
inline TreeNet assemble_radial(const UnivariateParts& parts, const UnifiedSquare& usq,
                               const Activation& act, int d) {
    TreeArch arch{3,
                  {d, 6, parts.s + 3, 3 * parts.n + 3},
                  {act.kind, act.kind, act.kind, act.kind},
                  act.theta0};
    TreeNet net(arch, parts.prec);
    const unsigned prec = parts.prec;
    const Real theta0 = act.anchor(prec);
    const Real zero(prec);
    for (size_t q = 0; q < parts.tops.size(); ++q) {
        const auto& top = parts.tops[q];
        net.set_node(3, static_cast<long>(q), top.outer_a, top.bias);
        for (int i = 0; i < parts.s + 3; ++i) {
            long idx2 = net.node_index(2, i, static_cast<long>(q));
            bool used = i < static_cast<int>(top.children.size());
            const Real coef = used ? top.children[i].coef : zero;
            const Real w = used ? top.children[i].w : zero;
            const Real b = used ? top.children[i].b : zero;
            net.set_node(2, idx2, coef, b);
            for (int k = 0; k < 6; ++k) {
                long idx1 = net.node_index(1, k, idx2);
                bool live = used && !usq.out_coef[k].is_zero();
                net.set_node(1, idx1, live ? w * usq.out_coef[k] : zero, live ? theta0 : zero);
                for (int l = 0; l < d; ++l) {
                    long idx0 = net.leaf_index(l, idx1);
                    if (live)
                        net.set_leaf(idx0, usq.leaf_coef[k], usq.leaf_w[k], theta0);
                    else
                        net.set_leaf(idx0, zero, zero, zero);
                }
            }
        }
    }
    net.metadata = {{"builder", "radial"},
                    {"n", parts.n},
                    {"m_active", parts.m_active},
                    {"d", d},
                    {"A", parts.A},
                    {"eps", parts.eps.to_double()},
                    {"eps1_square", usq.eps1.to_double()},
                    {"eps2_unify", usq.eps2.to_double()},
                    {"precision_bits", parts.prec}};
    return net;
}

// Max over a radius grid times seeded random directions of |f(x) - net(x)|.
// The direction stream is prefix-stable, so growing n_sphere never loses
// previously examined points.
inline Real measure_radial_error(const TreeNet& net, const RadialTarget& target, int n_radial,
                                 int n_sphere, std::uint64_t seed = 0) {
    if (n_radial < 1 || n_sphere < 1)
        throw argument_error("measure_radial_error: n_radial, n_sphere >= 1 required");
    const unsigned prec = net.precision_bits();
    Rng rng(seed);
    Real worst(prec);
    std::vector<std::vector<double>> dirs;
    for (int sphere = 0; sphere < n_sphere; ++sphere) dirs.push_back(rng.unit_vector(target.d));
    for (int ir = 0; ir < n_radial; ++ir) {
        double rho = n_radial == 1 ? 1.0 : static_cast<double>(ir) / (n_radial - 1);
        for (const auto& u : dirs) {
            std::vector<Real> x;
            x.reserve(target.d);
            for (double ui : u) x.push_back(Real(rho * ui, prec));
            worst = max(worst, abs(target.eval(x) - net.eval(x)));
        }
    }
    return worst;
}

struct RadialBuildOptions {
    unsigned precision_bits = kDefaultPrecision;
    unsigned precision_ceiling = 4096;
    double A_override = -1.0;  // < 0: use A = n^{r+1}
    int measure_radial = 48;
    int measure_sphere = 12;
    std::uint64_t measure_seed = 0;
};

struct RadialBuild {
    TreeNet net;
    BuildReport report;
    UnivariateParts parts;
    UnifiedSquare square;
};

inline RadialBuild build_radial_net(const RadialTarget& target, int n, const Activation& act,
                                    const RadialBuildOptions& opt = {}) {
    if (n < 2) throw argument_error("build_radial_net: n >= 2 required");
    if (target.d < 2) throw argument_error("build_radial_net: d >= 2 required");
    const double r = target.r();
    const double A = opt.A_override > 0 ? opt.A_override : std::pow(static_cast<double>(n), r + 1.0);
    const double eps = std::pow(static_cast<double>(n), -(r + 1.0));

    // g on J = [0, 1/2]: g(u) = g*(2u); the Hoelder constant picks up 2^r.
    const UnivariateTarget& gs = target.g;
    UnivariateTarget gJ{[gs](const Real& t, int k) {
                            Real scale(t.precision_bits());
                            mpfr_set_ui_2exp(scale.raw(), 1, k, MPFR_RNDN);
                            return scale * gs.deriv(t * 2.0, k);
                        },
                        gs.s,
                        gs.v,
                        gs.c0 * std::pow(2.0, r),
                        0.0,
                        0.5,
                        gs.sup_hint};

    unsigned prec = opt.precision_bits;
    for (int attempt = 0; attempt < 5; ++attempt) {
        UnivariateBuildOptions uopt{prec, opt.precision_ceiling};
        UnivariateParts parts = build_univariate_parts(gJ, n, A, eps, act, uopt);
        prec = parts.prec;

        Real lip = max(Real(1.0, prec), parts.lip_bound);
        Real eps1 = min(Real(1.0 / (target.d + 2), prec),
                        Real(eps, prec) / (Real(static_cast<long>(target.d + 2), prec) * lip));
        SquareStage sq = build_square_net(target.d, eps1, act);
        UnifiedSquare usq = unify_activation(sq, target.d, act);

        Real max_w = parts.max_abs_weight;
        for (const Real& v : usq.out_coef) max_w = max(max_w, abs(v));
        for (const Real& v : usq.leaf_coef) max_w = max(max_w, abs(v));
        unsigned need = detail::required_bits(max_w, Real(eps, prec));
        if (need > prec) {
            unsigned next = ((need + 63) / 64) * 64;
            if (next > opt.precision_ceiling)
                throw precision_error("radial construction needs " + std::to_string(next) +
                                      " mantissa bits, above the ceiling of " +
                                      std::to_string(opt.precision_ceiling));
            prec = next;
            continue;
        }

        TreeNet net = assemble_radial(parts, usq, act, target.d);
        BuildReport rep;
        rep.n = n;
        rep.d = target.d;
        rep.r = r;
        rep.A = A;
        rep.eps = eps;
        rep.eps1 = eps1.to_double();
        rep.eps2 = usq.eps2.to_double();
        rep.max_abs_weight = max_w.to_double();
        rep.param_count = net.arch().param_count();
        rep.precision_bits = prec;
        rep.measured_sup_error =
            measure_radial_error(net, target, opt.measure_radial, opt.measure_sphere, opt.measure_seed)
                .to_double();
        return RadialBuild{std::move(net), rep, std::move(parts), std::move(usq)};
    }
    throw precision_error("radial precision preflight did not converge");
}

}  // namespace radnet
