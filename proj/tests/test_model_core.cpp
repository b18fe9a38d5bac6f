#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "relaylab/model_core.hpp"

using namespace relaylab;

namespace {

ScalingExponents exps(Rational rk, Rational rp, Rational rq, Rational rc) {
    ScalingExponents e;
    e.r_k = rk;
    e.r_p = rp;
    e.r_q = rq;
    e.r_c = rc;
    return e;
}

Rational rand_rational(std::mt19937& g) {
    std::uniform_int_distribution<int> den(1, 8);
    const int d = den(g);
    std::uniform_int_distribution<int> num(0, d);
    return Rational(num(g), d);
}

}  // namespace

TEST_CASE("csi_quality") {
    CHECK(csi_quality(1, 1.0) == doctest::Approx(0.5));
    CHECK(csi_quality(100, 0.01) == doctest::Approx(0.5));  // depends only on E_t
    CHECK(csi_quality(10, 1e12) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(csi_quality(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(csi_quality(4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(csi_quality(4, -1.0), std::invalid_argument);

    // depends on (tau, P_t) only through the product E_t
    std::mt19937 g(1);
    std::uniform_int_distribution<int> taus(1, 64);
    for (int i = 0; i < 200; ++i) {
        const int t1 = taus(g), t2 = taus(g);
        const double pt = std::uniform_real_distribution<double>(0.01, 10.0)(g);
        CHECK(csi_quality(t1 * t2, pt) ==
              doctest::Approx(csi_quality(t1, double(t2) * pt)).epsilon(1e-14));
    }
    // bitwise when the training energies are bitwise equal
    CHECK(csi_quality(8, 0.25) == csi_quality(2, 1.0));
}

TEST_CASE("scaling_exponent reproduces Table I") {
    CHECK(scaling_exponent(exps(Rational(1), 0, 0, 0)).r_s == Rational(0));
    CHECK(scaling_exponent(exps(0, 0, 0, Rational(1))).r_s == Rational(0));
    CHECK(scaling_exponent(exps(Rational(1, 2), 0, Rational(1, 2), 0)).r_s == Rational(0));
    CHECK(scaling_exponent(exps(0, 0, 0, 0)).r_s == Rational(1));
    CHECK(scaling_exponent(exps(0, 0, 0, Rational(1, 2))).r_s == Rational(1, 2));
}

TEST_CASE("binding term labels the argmax, ties to the relay side") {
    CHECK(scaling_exponent(exps(0, Rational(1, 2), 0, 0)).binding_term ==
          BindingTerm::source_power);
    CHECK(scaling_exponent(exps(Rational(1, 2), 0, Rational(1, 4), 0)).binding_term ==
          BindingTerm::relay_per_user_power);
    CHECK(scaling_exponent(exps(Rational(1, 4), Rational(1, 2), Rational(1, 4), 0)).binding_term ==
          BindingTerm::relay_per_user_power);  // exact tie
}

TEST_CASE("favourable region") {
    CHECK(is_favourable(exps(Rational(1), 0, 0, 0)));
    CHECK(is_favourable(exps(0, 0, 0, Rational(1))));
    CHECK_FALSE(is_favourable(exps(0, Rational(1, 10), 0, Rational(1))));
    CHECK_THROWS_AS(is_favourable(exps(Rational(3, 2), 0, 0, 0)), std::invalid_argument);
}

TEST_CASE("sufficient condition for deterministic SINR") {
    CHECK(is_asymptotically_deterministic(exps(0, Rational(1, 2), 0, 0), Rational(1, 2)));
    CHECK(is_asymptotically_deterministic(
        exps(0, Rational(1, 4), Rational(1, 2), Rational(1, 2)), Rational(0)));
    CHECK_FALSE(is_asymptotically_deterministic(exps(0, 0, 0, 0), Rational(1)));
    // theorem-consistent form
    CHECK(is_asymptotically_deterministic(exps(0, 0, Rational(1, 2), 0)));
}

TEST_CASE("linear regime iff all exponents vanish") {
    CHECK(linear_sinr_condition(exps(0, 0, 0, 0)));
    CHECK_FALSE(linear_sinr_condition(exps(0, 0, 0, Rational(1, 100))));
    // consistency with the scaling law, both directions
    std::mt19937 g(7);
    for (int i = 0; i < 500; ++i) {
        const auto e = exps(rand_rational(g), rand_rational(g), rand_rational(g),
                            rand_rational(g));
        const bool lin = linear_sinr_condition(e);
        const bool rs1 = scaling_exponent(e).r_s == Rational(1);
        CHECK(lin == rs1);
    }
}

TEST_CASE("r_s is non-increasing in every exponent") {
    std::mt19937 g(11);
    for (int i = 0; i < 500; ++i) {
        auto e = exps(rand_rational(g), rand_rational(g), rand_rational(g), rand_rational(g));
        const Rational base = scaling_exponent(e).r_s;
        for (int which = 0; which < 4; ++which) {
            auto bumped = e;
            Rational& r = which == 0   ? bumped.r_k
                          : which == 1 ? bumped.r_p
                          : which == 2 ? bumped.r_q
                                       : bumped.r_c;
            if (r == Rational(1)) continue;
            r = r + (Rational(1) - r) / 2;
            CHECK(scaling_exponent(bumped).r_s <= base);
        }
    }
}

TEST_CASE("deterministic tuples with r_s >= 0 are favourable") {
    std::mt19937 g(13);
    int hits = 0;
    for (int i = 0; i < 5000; ++i) {
        const auto e = exps(rand_rational(g), rand_rational(g), rand_rational(g),
                            rand_rational(g));
        const auto rep = scaling_exponent(e);
        if (is_asymptotically_deterministic(e, rep.r_s) && rep.r_s >= Rational(0)) {
            ++hits;
            CHECK(is_favourable(e));
        }
    }
    CHECK(hits > 0);  // the property must actually be exercised
}

TEST_CASE("realize_parameters") {
    // Table I case 3 at M = 100
    ScalingExponents case3 = exps(Rational(1, 2), 0, Rational(1, 2), 0);
    case3.k0 = 1.0;
    case3.p0 = 0.1;
    case3.q0 = 1.0;
    case3.c0 = 1.25;
    const NetworkParams p3 = realize_parameters(case3, 100);
    CHECK(p3.K == 10);
    CHECK(p3.Q == doctest::Approx(0.1));
    CHECK(p3.P == doctest::Approx(10.0));
    CHECK(p3.P_c == doctest::Approx(0.8));

    // Table I case 4 at any M
    ScalingExponents case4 = exps(0, 0, 0, 0);
    case4.k0 = 20;
    case4.p0 = 1;
    case4.q0 = 1;
    case4.c0 = 1.25;
    for (int M : {64, 200, 512}) {
        const NetworkParams p = realize_parameters(case4, M);
        CHECK(p.K == 20);
        CHECK(p.P == doctest::Approx(1.0));
        CHECK(p.Q == doctest::Approx(1.0));
        CHECK(p.P_c == doctest::Approx(0.8));
        CHECK(p.tau == 20);
        CHECK(csi_quality(p.tau, p.P_t) == doctest::Approx(0.8));
    }

    ScalingExponents unit = exps(0, 0, 0, 0);
    CHECK(realize_parameters(unit, 7).K == 1);

    ScalingExponents toobig = exps(Rational(1), 0, 0, 0);
    toobig.k0 = 2.0;
    CHECK_THROWS_AS(realize_parameters(toobig, 16), std::invalid_argument);
}

TEST_CASE("rational parsing and exact floor snapping") {
    CHECK(parse_rational("1/2") == Rational(1, 2));
    CHECK(parse_rational("0.25") == Rational(1, 4));
    CHECK(parse_rational("1") == Rational(1));
    CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
    CHECK(pow_rational(100, Rational(1, 2)) == 10.0);
    CHECK(pow_rational(128, Rational(1, 2)) == doctest::Approx(std::sqrt(128.0)));
    CHECK(pow_rational(4096, Rational(1, 2)) == 64.0);
}
