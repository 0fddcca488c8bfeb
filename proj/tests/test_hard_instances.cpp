#include "radnet/hard_instances.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace radnet;

TEST_CASE("bump construction") {
    SECTION("r = 1: tent with nominal peak") {
        PackingBump b = make_bump(1.0, 1.0);
        CHECK(b.peak == 0.5);
        CHECK(b.peak_is_nominal);
        CHECK(b.eval(0.0) == 0.5);
        CHECK(b.eval(0.5) == 0.0);
        CHECK(b.eval(-0.5) == 0.0);
        CHECK(b.eval(0.7) == 0.0);
    }

    SECTION("r in (0,1): cusp profile still attains c0/2") {
        PackingBump b = make_bump(0.5, 2.0);
        CHECK(b.eval(0.0) == Catch::Approx(1.0));
        CHECK(b.peak_is_nominal);
    }

    SECTION("r = 2: the nominal peak is infeasible and the achieved one is recorded") {
        PackingBump b = make_bump(2.0, 1.0);
        CHECK_FALSE(b.peak_is_nominal);
        CHECK(b.peak == Catch::Approx(1.0 / 16.0));
        CHECK(b.eval(0.0) == Catch::Approx(b.peak));
        // derivative vanishes at the support edges and the center
        CHECK(b.deriv_s(0.5) == 0.0);
        CHECK(b.deriv_s(-0.5) == 0.0);
        CHECK(std::abs(b.deriv_s(1e-12)) < 1e-9);
    }

    SECTION("unsupported smoothness is a construction error") {
        CHECK_THROWS_AS(make_bump(2.5, 1.0), construction_error);
        CHECK_THROWS_AS(make_bump(3.0, 1.0), construction_error);
    }

    SECTION("sampled Hoelder constant honors the cap") {
        for (double r : {0.5, 1.0, 2.0}) {
            PackingBump b = make_bump(r, 1.0);
            Rng rng(55);
            double worst = 0.0;
            for (int i = 0; i < 10000; ++i) {
                double t1 = rng.uniform(-0.6, 0.6), t2 = rng.uniform(-0.6, 0.6);
                if (t1 == t2) continue;
                worst = std::max(worst, std::abs(b.deriv_s(t1) - b.deriv_s(t2)) /
                                            std::pow(std::abs(t1 - t2), b.v));
            }
            INFO("r=" << r);
            CHECK(worst <= b.holder_cap * (1.0 + 1e-3));
        }
    }
}

TEST_CASE("packing family structure") {
    PackingFamily fam = make_packing_family(4, 1.0, 1.0);

    SECTION("disjoint supports: at most one active term per point") {
        for (int i = 0; i <= 2000; ++i) {
            double t = i / 2000.0;
            int active = 0;
            for (int j = 1; j <= fam.n_star; ++j)
                if (fam.bump.eval(fam.n_star * (t - fam.center(j))) != 0.0) ++active;
            CHECK(active <= 1);
        }
    }

    SECTION("sign flip negates the member pointwise") {
        SignVector plus(4, 1), minus(4, -1);
        Rng rng(2);
        for (int i = 0; i < 100; ++i) {
            auto x = rng.ball_point(3);
            CHECK(packing_member(fam, plus, x) == -packing_member(fam, minus, x));
        }
    }

    SECTION("the j-th center sees only the j-th term") {
        SignVector signs{1, -1, 1, -1};
        for (int j = 1; j <= 4; ++j) {
            double t = fam.center(j);
            double expect = signs[j - 1] * fam.scale() * fam.bump.eval(0.0);
            CHECK(fam.member_g(signs, t) == Catch::Approx(expect));
        }
    }

    SECTION("enumeration yields all distinct sign vectors") {
        auto all = enumerate_signs(10);
        CHECK(all.size() == 1024);
        std::sort(all.begin(), all.end());
        CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
        CHECK_THROWS_AS(enumerate_signs(17), argument_error);
    }

    SECTION("signs length is validated") {
        SignVector bad(3, 1);
        CHECK_THROWS_AS(fam.member_g(bad, 0.5), argument_error);
    }
}

TEST_CASE("pairwise packing distances") {
    SECTION("any differing pair sits at the theory distance") {
        PackingFamily fam = make_packing_family(4, 1.0, 1.0);
        // Hamming distances 1, 2, and 4 all give the same sup distance
        SignVector base(4, 1);
        for (int flips : {1, 2, 4}) {
            SignVector other = base;
            for (int j = 0; j < flips; ++j) other[j] = -1;
            double dist = pairwise_packing_distance(fam, base, other);
            CHECK(std::abs(dist - 0.25) <= 0.0025);
        }
    }

    SECTION("N* = 1 pair distance is c0") {
        PackingFamily fam = make_packing_family(1, 1.0, 1.0);
        double dist = pairwise_packing_distance(fam, SignVector{1}, SignVector{-1});
        CHECK(std::abs(dist - 1.0) <= 0.01);
    }

    SECTION("distance scales linearly in c0") {
        PackingFamily f1 = make_packing_family(2, 1.0, 1.0);
        PackingFamily f3 = make_packing_family(2, 1.0, 3.0);
        SignVector a{1, 1}, b{1, -1};
        double d1 = pairwise_packing_distance(f1, a, b);
        double d3 = pairwise_packing_distance(f3, a, b);
        CHECK(d3 == Catch::Approx(3.0 * d1));
    }

    SECTION("identical sign vectors are rejected") {
        PackingFamily fam = make_packing_family(2, 1.0, 1.0);
        SignVector a{1, -1};
        CHECK_THROWS_AS(pairwise_packing_distance(fam, a, a), argument_error);
    }
}

TEST_CASE("sampled Hoelder membership of family members") {
    for (double r : {1.0, 2.0}) {
        PackingFamily fam = make_packing_family(4, r, 1.0);
        Rng rng(8);
        for (int trial = 0; trial < 6; ++trial) {
            SignVector signs = sample_signs(4, rng);
            double worst = member_sampled_holder(fam, signs, 10000, 100 + trial);
            INFO("r=" << r);
            CHECK(worst <= fam.c0 * (1.0 + 1e-3));
        }
    }
}

TEST_CASE("lower-bound curves") {
    SECTION("exponent arithmetic at d = 2 makes shallow and deep agree") {
        LowerBoundParams p;
        p.d = 2;
        p.r = 1.5;
        p.n_values = {8, 16};
        LowerBoundTable tab = lower_bound_curves(p);
        for (const auto& row : tab.rows)
            CHECK(row.shallow == Catch::Approx(std::pow(row.n, -p.r)));
    }

    SECTION("explicit constant at beta = 0, r = 1, c0 = 8") {
        LowerBoundParams p;
        p.beta = 0.0;
        p.r = 1.0;
        p.c0 = 8.0;
        p.n_values = {4};
        LowerBoundTable tab = lower_bound_curves(p);
        CHECK(tab.C3p == Catch::Approx(1.0 / 6.0));
        CHECK(tab.C4p == Catch::Approx(2.0 * p.C1p + 4.0 * p.C2p / 8.0 * 6.0));
    }

    SECTION("curves decrease in n") {
        LowerBoundParams p;
        p.n_values = {4, 8, 16, 32, 64};
        LowerBoundTable tab = lower_bound_curves(p);
        for (size_t i = 1; i < tab.rows.size(); ++i) {
            CHECK(tab.rows[i].shallow < tab.rows[i - 1].shallow);
            CHECK(tab.rows[i].deep < tab.rows[i - 1].deep);
            CHECK(tab.rows[i].explicit_bound < tab.rows[i - 1].explicit_bound);
        }
    }

    SECTION("empty input is rejected") {
        CHECK_THROWS_AS(lower_bound_curves(LowerBoundParams{}), argument_error);
    }
}
