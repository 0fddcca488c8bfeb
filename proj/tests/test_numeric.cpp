#include "radnet/numeric.hpp"
#include "radnet/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace radnet;

namespace {
constexpr unsigned P = 256;
}

TEST_CASE("Real arithmetic respects the precision contract") {
    Real a(1.5, 256), b(2.5, 256), c(1.5, 128);
    CHECK((a + b).to_double() == 4.0);
    CHECK_THROWS_AS(a + c, precision_mismatch_error);
    CHECK_THROWS_AS(Real(1.0, 32), argument_error);

    // relative rounding error of a single operation is below 2^{1-p}
    Real x(1.0 / 3.0, 64), y(1.0 / 7.0, 64);
    Real prod64 = x * y;
    Real xe(1.0 / 3.0, 256), ye(1.0 / 7.0, 256);
    Real exact = xe * ye;
    double rel = std::abs(prod64.to_double() - exact.to_double()) / exact.to_double();
    CHECK(rel <= std::pow(2.0, 1.0 - 64.0));
}

TEST_CASE("Real decimal serialization round-trips bit-exactly") {
    Rng rng(21);
    for (int i = 0; i < 50; ++i) {
        Real v = rng.uniform_real(-10, 10, P) * exp(rng.uniform_real(-40, 40, P));
        Real back = Real::from_string(v.to_string(), P);
        CHECK(back == v);
    }
    CHECK(Real::from_string("0", P).is_zero());
    CHECK_THROWS_AS(Real::from_string("pear", P), parse_error);
}

TEST_CASE("grid_sup_norm basics") {
    GridSpec g01{0.0, 1.0, 11, GridKind::uniform};
    auto ident = [](const Real& t) { return t; };
    auto zero = [](const Real& t) { return Real(t.precision_bits()); };

    CHECK(grid_sup_norm(ident, ident, g01, P).is_zero());
    CHECK(grid_sup_norm(ident, zero, g01, P).to_double() == 1.0);

    // max of t - t^2 is 1/4 at t = 1/2 (calculus oracle)
    GridSpec dense{0.0, 1.0, 10000, GridKind::uniform};
    Real m = grid_sup_norm([](const Real& t) { return t * t; }, ident, dense, P);
    CHECK(std::abs(m.to_double() - 0.25) < 1e-7);

    CHECK_THROWS_AS(grid_sup_norm([](const Real& t) { return 1.0 / t; }, zero, g01, P),
                    evaluation_error);
    CHECK_THROWS_AS((GridSpec{1.0, 0.0, 11}.points(P)), argument_error);
    CHECK_THROWS_AS((GridSpec{0.0, 1.0, 1}.points(P)), argument_error);
}

TEST_CASE("grid_sup_norm is monotone on nested uniform grids") {
    auto f = [](const Real& t) { return sin(t * 9.0); };
    auto zero = [](const Real& t) { return Real(t.precision_bits()); };
    Real prev(P);
    for (long count : {11, 21, 41, 81}) {  // each refines the previous grid
        Real cur = grid_sup_norm(f, zero, GridSpec{0.0, 1.0, count}, P);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("finite differences") {
    auto sq = [](const Real& t) { return t * t; };
    Real h(1e-4, P);
    CHECK(std::abs(finite_diff(sq, 2, Real(0.37, P), h).to_double() - 2.0) < 1e-30);
    CHECK(std::abs(finite_diff([](const Real& t) { return sin(t); }, 1, Real(0.0, P), h).to_double() -
                   1.0) < 1e-7);
    CHECK(finite_diff([](const Real& t) { return Real(3.0, t.precision_bits()); }, 3, Real(0.1, P), h)
              .is_zero());
    CHECK_THROWS_AS(finite_diff(sq, 2, Real(0.0, P), Real(0.0, P)), argument_error);
    CHECK_THROWS_AS(finite_diff(sq, 0, Real(0.0, P), h), argument_error);
}

TEST_CASE("composite Simpson quadrature") {
    Real a(0.0, P), b(1.0, P);
    CHECK(std::abs(quadrature([](const Real& t) { return Real(1.0, t.precision_bits()); }, a, b)
                       .to_double() -
                   1.0) < 1e-60);
    CHECK(std::abs(quadrature([](const Real& t) { return t; }, a, b).to_double() - 0.5) < 1e-60);
    CHECK(std::abs(quadrature([](const Real& t) { return t * t * t; }, a, b).to_double() - 0.25) <
          1e-12);
    CHECK_THROWS_AS(quadrature([](const Real& t) { return 1.0 / t; }, a, b), evaluation_error);
    CHECK_THROWS_AS(quadrature([](const Real& t) { return t; }, a, b, 0), argument_error);
}

TEST_CASE("seeded randomness is reproducible and jitter grids depend on the seed") {
    Rng r1(42), r2(42), r3(43);
    for (int i = 0; i < 100; ++i) {
        double a = r1.uniform(), b = r2.uniform();
        CHECK(a == b);
        (void)r3.uniform();
    }
    GridSpec j{0.0, 1.0, 10, GridKind::uniform_plus_jitter, 5, 7};
    auto p1 = j.points(P), p2 = j.points(P);
    for (size_t i = 0; i < p1.size(); ++i) CHECK(p1[i] == p2[i]);
    j.seed = 8;
    auto p3 = j.points(P);
    CHECK(p3.back() != p1.back());

    Rng g1(5), g2(5);
    auto u1 = g1.unit_vector(4), u2 = g2.unit_vector(4);
    CHECK(u1 == u2);
    double norm = 0;
    for (double v : u1) norm += v * v;
    CHECK(std::abs(norm - 1.0) < 1e-12);
}
