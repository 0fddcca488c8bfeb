#include "radnet/radial.hpp"
#include "radnet/targets.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace radnet;

namespace {
constexpr unsigned P = 256;

const Activation& logistic_act() {
    static Activation act = make_activation("logistic", 10);
    return act;
}

std::vector<Real> ball_point(int d, Rng& rng, unsigned prec = P) {
    std::vector<Real> x;
    for (double v : rng.ball_point(d)) x.emplace_back(v, prec);
    return x;
}

Real sq_norm(const std::vector<Real>& x) {
    Real s(x[0].precision_bits());
    for (const Real& xi : x) s += xi * xi;
    return s;
}
}  // namespace

TEST_CASE("square-stage subnet") {
    const Activation& act = logistic_act();
    const int d = 4;
    Real eps1(1e-3, P);
    SquareStage sq = build_square_net(d, eps1, act);
    Real cap = Real(static_cast<long>(d), P) * eps1 / 2.0;

    SECTION("zero input") {
        std::vector<Real> zero(d, Real(P));
        CHECK(abs(sq.eval(zero)) <= cap);
    }

    SECTION("unit vector") {
        std::vector<Real> e1(d, Real(P));
        e1[0] = Real(1.0, P);
        CHECK(abs(Real(0.5, P) - sq.eval(e1)) <= cap);
    }

    SECTION("random points in the ball") {
        Rng rng(40);
        for (int i = 0; i < 200; ++i) {
            auto x = ball_point(d, rng);
            CHECK(abs(sq_norm(x) / 2.0 - sq.eval(x)) <= cap);
        }
    }

    SECTION("out-of-range budgets are rejected") {
        CHECK_THROWS_AS(build_square_net(d, Real(0.5, P), act), argument_error);
    }
}

TEST_CASE("activation unification") {
    const Activation& act = logistic_act();
    const int d = 4;
    Real eps1(1e-3, P);
    SquareStage sq = build_square_net(d, eps1, act);
    UnifiedSquare usq = unify_activation(sq, d, act);

    CHECK(usq.out_coef.size() == 6);

    Rng rng(41);
    Real cap = Real(static_cast<long>(d + 2), P) * eps1 / 2.0;
    Real maxval(P);
    for (int i = 0; i < 400; ++i) {
        auto x = ball_point(d, rng);
        Real v = usq.eval_with(act, x);
        CHECK(abs(sq_norm(x) / 2.0 - v) <= cap);
        maxval = max(maxval, abs(v));
    }
    CHECK(maxval <= 1.0);
}

TEST_CASE("radial construction") {
    const Activation& act = logistic_act();

    SECTION("constant targets come out nearly exact") {
        RadialTarget target = named_radial_target("constant", 1.0, 3, 0.4);
        RadialBuild rb = build_radial_net(target, 4, act);
        CHECK(rb.report.measured_sup_error <= 0.05);
    }

    SECTION("widths match the instantiation and the sandwich holds") {
        RadialTarget target = named_radial_target("identity", 1.0, 2);
        RadialBuild rb = build_radial_net(target, 8, act);
        CHECK(rb.net.arch().widths == std::vector<int>{2, 6, 3, 27});
        long unit = 2L * 3 * 27;
        CHECK(6 * unit <= rb.report.param_count);
        CHECK(rb.report.param_count <= 54 * unit);
        CHECK(rb.report.param_count == rb.net.structural_param_count());
    }

    SECTION("weight bounds with the theorem exponent") {
        RadialTarget target = named_radial_target("identity", 1.0, 2);
        RadialBuild rb = build_radial_net(target, 4, act);
        const double r = 1.0, s = 0.0;
        double alpha = 48.0 * (3.0 + r * (r + 1.0) + r * std::tgamma(s + 2.0) * 7.0 * (r + 1.0));
        double R = std::max(std::abs(act.theta0) + 4.0, rb.report.max_abs_weight);
        const unsigned prec = rb.net.precision_bits();
        BoundCheck bc = rb.net.check_bounds(BoundedClassSpec(Real(alpha, prec), Real(R, prec)));
        CHECK(bc.ok);
    }

    SECTION("dimension robustness at fixed n") {
        RadialTarget t2 = named_radial_target("identity", 1.0, 2);
        RadialTarget t4 = named_radial_target("identity", 1.0, 4);
        RadialBuild b2 = build_radial_net(t2, 8, act);
        RadialBuild b4 = build_radial_net(t4, 8, act);
        double lo = std::min(b2.report.measured_sup_error, b4.report.measured_sup_error);
        double hi = std::max(b2.report.measured_sup_error, b4.report.measured_sup_error);
        CHECK(hi / lo < 3.0);
    }

    SECTION("preconditions") {
        RadialTarget target = named_radial_target("identity", 1.0, 2);
        CHECK_THROWS_AS(build_radial_net(target, 1, act), argument_error);
        RadialTarget bad = named_radial_target("identity", 1.0, 1);
        CHECK_THROWS_AS(build_radial_net(bad, 4, act), argument_error);
    }

    SECTION("net round-trips through the document format") {
        RadialTarget target = named_radial_target("identity", 1.0, 2);
        RadialBuild rb = build_radial_net(target, 4, act);
        TreeNet back = TreeNet::from_json(rb.net.to_json());
        Rng rng(9);
        auto x = ball_point(2, rng, rb.net.precision_bits());
        CHECK(back.eval(x) == rb.net.eval(x));
    }
}

TEST_CASE("radial error measurement") {
    const Activation& act = logistic_act();
    RadialTarget one = named_radial_target("constant", 1.0, 3, 1.0);
    TreeArch arch{3, {3, 6, 3, 9}, {act.kind, act.kind, act.kind, act.kind}, act.theta0};
    TreeNet zero_net(arch, P);

    SECTION("zero net against the constant-one target reads 1") {
        Real err = measure_radial_error(zero_net, one, 16, 4);
        CHECK(err.to_double() == 1.0);
    }

    SECTION("growing the direction set never shrinks the maximum") {
        RadialTarget target = named_radial_target("sin2pi", 1.0, 3);
        Real prev(P);
        for (int ns : {1, 2, 4, 8}) {
            Real cur = measure_radial_error(zero_net, target, 8, ns, 77);
            CHECK(cur >= prev);
            prev = cur;
        }
    }

    SECTION("argument checks") {
        CHECK_THROWS_AS(measure_radial_error(zero_net, one, 0, 4), argument_error);
    }
}
