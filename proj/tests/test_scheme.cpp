#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hj/scheme.hpp"

using namespace hj;
using namespace hj::scheme;

namespace {

std::vector<Hamiltonian> all_kinds() {
    return {Hamiltonian::eikonal_squared(), Hamiltonian::eikonal_norm(), Hamiltonian::quadratic(),
            Hamiltonian::reeds_shepp(1.0, 1.0), Hamiltonian::pursuit_evasion(0.8, 1.0, 1.0, 1.2)};
}

}  // namespace

TEST_CASE("one-sided differences") {
    SUBCASE("exact on affine fields for any delta") {
        const Point c{2.0, -1.0, 0.5};
        const Field u = [&](Span x) {
            double s = 3.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += c[i] * x[i];
            return s;
        };
        for (double delta : {1e-3, 0.1, 0.9}) {
            const Point x{0.3, 0.7, -0.2};
            const auto gp = d_plus(u, x, delta);
            const auto gm = d_minus(u, x, delta);
            for (int i = 0; i < 3; ++i) {
                CHECK(gp[i] == doctest::Approx(c[i]).epsilon(1e-12));
                CHECK(gm[i] == doctest::Approx(c[i]).epsilon(1e-12));
            }
        }
    }
    SUBCASE("constant fields give zero") {
        const Field u = [](Span) { return 4.0; };
        CHECK(d_plus(u, Point{0.0, 0.0}, 0.3) == std::vector<double>{0.0, 0.0});
        CHECK(d_minus(u, Point{0.0, 0.0}, 0.3) == std::vector<double>{0.0, 0.0});
    }
    SUBCASE("x^2 at x=1 with delta=0.5") {
        const Field u = [](Span x) { return x[0] * x[0]; };
        CHECK(d_plus(u, Point{1.0}, 0.5)[0] == doctest::Approx(2.5));
        CHECK(d_minus(u, Point{1.0}, 0.5)[0] == doctest::Approx(1.5));
        CHECK_THROWS_AS(d_plus(u, Point{1.0}, 0.0), std::invalid_argument);
    }
}

TEST_CASE("lax-friedrichs hand values") {
    const auto eik = Hamiltonian::eikonal_squared();
    SchemeConfig cfg{1.0, 0.1, 0.0, {}};

    // equal slopes reproduce H exactly
    CHECK(lax_friedrichs(eik, cfg, Point{0.0}, Point{0.7}, Point{0.7}) ==
          doctest::Approx(0.7 * 0.7 - 1.0));

    // d=1, alpha=1, p+ = 1, p- = -1: H(0) - (2)/2 = -2
    CHECK(lax_friedrichs(eik, cfg, Point{0.0}, Point{1.0}, Point{-1.0}) == doctest::Approx(-2.0));

    // the distance function solves the scheme away from its kink
    const Field dist = [](Span x) { return std::min(x[0], 1.0 - x[0]); };
    CHECK(residual(eik, cfg, dist, Point{0.25}) == doctest::Approx(0.0));

    // tau > 0 requires the center value
    SchemeConfig taucfg{1.0, 0.1, 0.5, {}};
    CHECK_THROWS_AS(lax_friedrichs(eik, taucfg, Point{0.0}, Point{1.0}, Point{1.0}),
                    std::invalid_argument);
    CHECK(lax_friedrichs(eik, taucfg, Point{0.0}, Point{1.0}, Point{1.0}, 2.0) ==
          doctest::Approx(1.0));
    CHECK_THROWS_AS(lax_friedrichs(eik, cfg, Point{0.0}, Point{1.0, 1.0}, Point{1.0}),
                    std::invalid_argument);
}

TEST_CASE("time-dependent residual") {
    const auto eik = Hamiltonian::eikonal_squared();
    SchemeConfig cfg{1.0, 0.1, 0.0, 0.05};

    // u(x,t) = t + x: residual = dt + dt * Hhat(1,1) = dt
    const TimeField u = [](Span x, double t) { return t + x[0]; };
    CHECK(residual_time(eik, cfg, u, Point{0.3}, 0.2) == doctest::Approx(0.05));

    // stationary in t, scheme satisfied spatially: residual 0
    const TimeField v = [](Span x, double) { return x[0]; };
    CHECK(residual_time(eik, cfg, v, Point{0.3}, 0.2) == doctest::Approx(0.0));

    SchemeConfig no_dt{1.0, 0.1, 0.0, {}};
    CHECK_THROWS_AS(residual_time(eik, no_dt, u, Point{0.3}, 0.2), std::invalid_argument);

    // the scheme term is linear in delta_t
    const TimeField w = [](Span x, double t) { return std::sin(x[0]) + 0.3 * t; };
    SchemeConfig c1{1.0, 0.1, 0.0, 0.02};
    SchemeConfig c2{1.0, 0.1, 0.0, 0.04};
    const double r1 = residual_time(eik, c1, w, Point{0.3}, 0.2);
    const double r2 = residual_time(eik, c2, w, Point{0.3}, 0.2);
    // r(dt) = dt * (du/dt-ish + Hhat); the du part here is exactly 0.3 * dt
    const double s1 = r1 / 0.02;
    const double s2 = r2 / 0.04;
    CHECK(s1 == doctest::Approx(s2).epsilon(1e-9));
}

TEST_CASE("consistency identity") {
    for (const auto& h : all_kinds()) {
        for (double alpha : {0.3, 1.0, 2.5}) {
            SchemeConfig cfg{alpha, 0.2, 0.0, {}};
            CHECK(check_consistency(h, cfg, 2, 2000, 9));
        }
    }
    // vacuous truth on zero probes
    CHECK(check_consistency(Hamiltonian::eikonal_squared(), SchemeConfig{1, 0.1, 0, {}}, 2, 0));
    // tau > 0 deliberately breaks consistency with H
    SchemeConfig taucfg{1.0, 0.2, 0.7, {}};
    CHECK(!check_consistency(Hamiltonian::eikonal_squared(), taucfg, 2, 100, 9));
}

TEST_CASE("monotonicity probes") {
    const double L = 1.0;
    for (const auto& h : all_kinds()) {
        // alpha at the closed-form bound: no violation may appear
        SchemeConfig good{h.ch_bound(L), 0.25, 0.0, {}};
        CHECK(check_monotonicity(h, good, L, 2, 5000, 33));
    }
    // far below the bound a violating probe must exist
    SchemeConfig bad{0.1, 0.25, 0.0, {}};
    CHECK(!check_monotonicity(Hamiltonian::eikonal_squared(), bad, 1.0, 2, 5000, 33));
}

TEST_CASE("uniqueness condition") {
    const auto eik = Hamiltonian::eikonal_squared();

    // 2 * 2.5 * sin^2(0.375 pi) ~ 4.268 > C_H(1) = 2
    SchemeConfig cfg{2.5, 0.75, 0.0, {}};
    const auto c = uniqueness_condition(eik, cfg, 1.0, 2);
    CHECK(c.satisfied);
    CHECK(c.margin == doctest::Approx(2.0 * 2.5 * std::pow(std::sin(0.375 * M_PI), 2) - 2.0));
    CHECK(c.margin == doctest::Approx(2.268).epsilon(1e-3));

    // alpha -> 0 never satisfies
    CHECK(!uniqueness_condition(eik, SchemeConfig{1e-9, 0.75, 0.0, {}}, 1.0, 2).satisfied);

    // the tau/d term alone can close the gap
    SchemeConfig taucfg{1e-9, 0.75, 2.0 * 2.0, {}};
    CHECK(uniqueness_condition(eik, taucfg, 1.0, 2).satisfied);

    // monotone in alpha, delta (on (0,1]) and tau
    double prev = -1e300;
    for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
        const double m = uniqueness_condition(eik, SchemeConfig{alpha, 0.5, 0.0, {}}, 1.0, 2).margin;
        CHECK(m >= prev);
        prev = m;
    }
    prev = -1e300;
    for (double delta : {0.1, 0.3, 0.6, 1.0}) {
        const double m = uniqueness_condition(eik, SchemeConfig{2.0, delta, 0.0, {}}, 1.0, 2).margin;
        CHECK(m >= prev);
        prev = m;
    }
}

TEST_CASE("config validation and the time-step stability rule") {
    CHECK_THROWS_AS((SchemeConfig{-1.0, 0.1, 0.0, {}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((SchemeConfig{1.0, 0.0, 0.0, {}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((SchemeConfig{1.0, 0.1, -0.1, {}}).validate(), std::invalid_argument);

    // delta_t <= delta / (2 d alpha) is the monotone-update cap
    SchemeConfig ok{1.0, 0.4, 0.0, 0.1};
    CHECK(ok.time_step_stable(2));
    SchemeConfig warn{1.0, 0.4, 0.0, 0.2};
    CHECK(!warn.time_step_stable(2));
}
