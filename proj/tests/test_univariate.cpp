#include "radnet/targets.hpp"
#include "radnet/univariate.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace radnet;

namespace {
constexpr unsigned P = 256;

const Activation& logistic_act() {
    static Activation act = make_activation("logistic", 10);
    return act;
}

// targets on J = [0, 1/2]
UnivariateTarget const_on_J(double c) {
    return UnivariateTarget{[c](const Real& t, int k) {
                                return Real(k == 0 ? c : 0.0, t.precision_bits());
                            },
                            0, 1.0, 1e-12, 0.0, 0.5, std::abs(c)};
}

UnivariateTarget ident_on_J() {
    return UnivariateTarget{[](const Real& t, int k) {
                                if (k == 0) return t;
                                return Real(k == 1 ? 1.0 : 0.0, t.precision_bits());
                            },
                            0, 1.0, 1.0, 0.0, 0.5, 0.5};
}

UnivariateTarget sin_on_J() {
    // g(t) = sin(2 pi t) / (2 pi), s = 0, Lipschitz 1
    return UnivariateTarget{[](const Real& t, int k) {
                                const unsigned p = t.precision_bits();
                                if (k == 0) return sin(2.0 * pi(p) * t) / (2.0 * pi(p));
                                if (k == 1) return cos(2.0 * pi(p) * t);
                                return -sin(2.0 * pi(p) * t) * 2.0 * pi(p);
                            },
                            0, 1.0, 1.0, 0.0, 0.5, 1.0 / (2.0 * 3.141592653589793)};
}
}  // namespace

TEST_CASE("bump system telescopes exactly") {
    const Activation& act = logistic_act();
    for (int n : {1, 4, 16})
        for (double A : {4.0, 64.0, 1024.0}) {
            BumpSystem sys{A, n};
            Rng rng(1000 + n);
            double worst = 0.0;
            for (int i = 0; i < 100; ++i) {
                Real t = rng.uniform_real(0.0, 0.5, P);
                Real sum(P);
                for (int j = 0; j <= n; ++j) sum += bump(sys, act, j, t);
                worst = std::max(worst, ulp_distance(sum, sys.edge(act, n, t)));
            }
            INFO("n=" << n << " A=" << A);
            CHECK(worst <= 10.0);
        }
}

TEST_CASE("bump bounds and localization") {
    const Activation& act = logistic_act();
    BumpSystem sys{64.0, 8};
    Rng rng(5);
    Real two(2.0, P);
    Real twodelta = delta_phi(act, Real(sys.A, P)) * 2.0;
    for (int i = 0; i < 300; ++i) {
        Real t = rng.uniform_real(0.0, 0.5, P);
        // locate the active cell
        int j0 = std::min(static_cast<int>(t.to_double() * 2 * sys.n), sys.n - 1);
        for (int j = 0; j <= sys.n; ++j) {
            Real b = bump(sys, act, j, t);
            CHECK(abs(b) <= two);
            if (j <= j0 - 1) CHECK(abs(b) <= twodelta);
        }
    }
    CHECK_THROWS_AS(bump(sys, act, -1, Real(0.2, P)), argument_error);
    CHECK_THROWS_AS(bump(sys, act, 9, Real(0.2, P)), argument_error);
}

TEST_CASE("Taylor polynomial at a node") {
    SECTION("polynomial targets reproduce exactly") {
        // g(t) = 3 + 2t with s = 1: the degree-1 Taylor expansion is exact
        UnivariateTarget g{[](const Real& t, int k) {
                               if (k == 0) return t * 2.0 + 3.0;
                               return Real(k == 1 ? 2.0 : 0.0, t.precision_bits());
                           },
                           1, 1.0, 1e-12, 0.0, 0.5, 4.0};
        Real tj(0.25, P);
        for (double t : {0.0, 0.1, 0.49}) {
            Real x(t, P);
            CHECK(ulp_distance(taylor_at_node(g, 1, tj, x), g.g(x)) < 8);
        }
    }

    SECTION("t = t_j returns g(t_j) exactly") {
        UnivariateTarget g = sin_on_J();
        Real tj(0.3, P);
        CHECK(taylor_at_node(g, 0, tj, tj) == g.g(tj));
    }

    SECTION("remainder respects the Hoelder bound") {
        // |g - T| <= (c0/s!) |t - t_j|^r with r = 2 for the sine target
        UnivariateTarget g{[](const Real& t, int k) {
                               const unsigned p = t.precision_bits();
                               if (k == 0) return sin(2.0 * pi(p) * t) / (2.0 * pi(p));
                               if (k == 1) return cos(2.0 * pi(p) * t);
                               return -sin(2.0 * pi(p) * t) * 2.0 * pi(p);
                           },
                           1, 1.0, 2.0 * 3.141592653589793, 0.0, 0.5, 1.0};
        Real tj(0.25, P), t(0.3, P);
        Real err = abs(g.g(t) - taylor_at_node(g, 1, tj, t));
        CHECK(err.to_double() <= 2.0 * 3.141592653589793 * 0.05 * 0.05);
    }
}

TEST_CASE("localized operator error bound") {
    const Activation& act = logistic_act();
    struct Case {
        UnivariateTarget g;
        const char* name;
    };
    Case cases[] = {{const_on_J(1.0), "constant"}, {ident_on_J(), "identity"}, {sin_on_J(), "sine"}};
    for (const auto& c : cases) {
        Real C3 = phi_operator_constant(c.g, P);
        for (int n : {4, 16})
            for (double A : {16.0, 256.0}) {
                Real bound = C3 * (Real(static_cast<long>(n), P) * delta_phi(act, Real(A, P)) +
                                   pow(Real(static_cast<long>(n), P), Real(-c.g.r(), P)));
                Rng rng(7);
                for (int i = 0; i < 60; ++i) {
                    Real t = rng.uniform_real(0.0, 0.5, P);
                    Real err = abs(c.g.g(t) - phi_operator(c.g, n, c.g.s, A, act, t));
                    INFO(c.name << " n=" << n << " A=" << A << " t=" << t.to_double());
                    CHECK(err <= bound);
                }
            }
    }
}

TEST_CASE("operator on the constant target telescopes tightly") {
    const Activation& act = logistic_act();
    UnivariateTarget g = const_on_J(1.0);
    int n = 8;
    double A = 32.0;
    Real cap = Real(2.0 * n + 1.0, P) * delta_phi(act, Real(A, P));
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        Real t = rng.uniform_real(0.0, 0.5, P);
        CHECK(abs(Real(1.0, P) - phi_operator(g, n, 0, A, act, t)) <= cap);
    }
}

TEST_CASE("sharp bumps reduce the operator to a Taylor patch") {
    const Activation& act = logistic_act();
    UnivariateTarget g = sin_on_J();
    const double A = 1e6;
    // with n = 1 the transition sits at t = 1/4: left of it the node-0 patch,
    // right of it the node-1 patch
    for (double t : {0.05, 0.2}) {
        Real x(t, P);
        Real patch = g.g(Real(0.0, P));
        CHECK(abs(phi_operator(g, 1, 0, A, act, x) - patch).to_double() <= 1e-6);
    }
    for (double t : {0.3, 0.45}) {
        Real x(t, P);
        Real patch = g.g(Real(0.5, P));
        CHECK(abs(phi_operator(g, 1, 0, A, act, x) - patch).to_double() <= 1e-6);
    }
}

TEST_CASE("two-hidden-layer construction") {
    const Activation& act = logistic_act();

    SECTION("zero target gives a zero net") {
        auto [net, parts] = build_univariate_net(const_on_J(0.0), 4, 16.0, 0.0625, act);
        GridSpec grid{0.0, 0.5, 101, GridKind::uniform};
        for (const Real& t : grid.points(P)) CHECK(net.eval({t}).is_zero());
    }

    SECTION("widths, weight caps, and the recorded error bound") {
        UnivariateTarget g = ident_on_J();
        for (int n : {4, 8}) {
            double A = static_cast<double>(n) * n;
            auto [net, parts] = build_univariate_net(g, n, A, 1.0 / (A), act);
            CHECK(net.arch().widths == std::vector<int>{1, 3, 3 * n + 3});

            // biases within 1 + 3An + |theta0|; inner weights within 4An
            Real bias_cap(1.0 + 3.0 * A * n + std::abs(act.theta0), P);
            Real w_cap(4.0 * A * n, P);
            for (const auto& top : parts.tops) {
                CHECK(abs(top.bias) <= bias_cap);
                for (const auto& c : top.children) {
                    CHECK(abs(c.w) <= w_cap);
                    CHECK(abs(c.b) <= bias_cap);
                }
            }

            // measured error within the recorded C4 bound
            GridSpec grid{0.0, 0.5, 1000, GridKind::uniform};
            Real err(P);
            for (const Real& t : grid.points(P)) err = max(err, abs(net.eval({t}) - g.g(t)));
            CHECK(err <= parts.error_bound);
        }
    }

    SECTION("rate sweep on the identity target") {
        UnivariateTarget g = ident_on_J();
        std::vector<double> ln, le;
        for (int n : {4, 8, 16}) {
            double A = static_cast<double>(n) * n;
            auto [net, parts] = build_univariate_net(g, n, A, 1.0 / A, act);
            GridSpec grid{0.0, 0.5, 800, GridKind::uniform};
            Real err(P);
            for (const Real& t : grid.points(P)) err = max(err, abs(net.eval({t}) - t));
            ln.push_back(std::log(static_cast<double>(n)));
            le.push_back(std::log(err.to_double()));
        }
        CHECK(fit_slope(ln, le) <= -0.7);
    }

    SECTION("smoothness beyond the activation order is rejected") {
        Activation rough = make_activation("logistic", 2);
        UnivariateTarget g = ident_on_J();
        g.s = 2;
        CHECK_THROWS_AS(build_univariate_net(g, 4, 16.0, 0.05, rough), unsupported_order_error);
    }

    SECTION("precision ceiling failures name the required bits") {
        UnivariateBuildOptions opt;
        opt.precision_bits = 256;
        opt.precision_ceiling = 256;
        UnivariateTarget g = ident_on_J();
        try {
            // eps = n^{-2} at n = 64 needs well over 256 bits once the gate
            // coefficients blow past 2^(256-74)
            build_univariate_parts(g, 64, 1e7, 1e-7, act, opt);
            // if it fits, force a tighter ceiling instead
            opt.precision_ceiling = 128;
            SUCCEED("construction fit inside 256 bits");
        } catch (const precision_error& e) {
            CHECK(std::string(e.what()).find("bits") != std::string::npos);
        }
    }
}

TEST_CASE("finite-sample Hoelder checks accept the declared constants") {
    UnivariateTarget g = sin_on_J();
    Real worst = sampled_holder_constant(g, 2000, 11, P);
    CHECK(worst.to_double() <= g.c0 * (1.0 + 1e-3));
}
