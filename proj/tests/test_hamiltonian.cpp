#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hj/geometry.hpp"
#include "hj/hamiltonian.hpp"

using namespace hj;

namespace {

// Central finite differences of eval in p; the oracle for grad_p.
std::vector<double> fd_grad_p(const Hamiltonian& h, Span x, const Point& p, double step = 1e-6) {
    std::vector<double> g(p.size());
    Point q = p;
    for (std::size_t i = 0; i < p.size(); ++i) {
        q[i] = p[i] + step;
        const double up = h.eval(x, q);
        q[i] = p[i] - step;
        const double dn = h.eval(x, q);
        q[i] = p[i];
        g[i] = (up - dn) / (2.0 * step);
    }
    return g;
}

// Margin test on the |.| arguments so FD probes stay off the kinks.
bool kink_free(const Hamiltonian& h, const Point& x, const Point& p, double margin) {
    switch (h.kind()) {
        case Hamiltonian::Kind::EikonalNorm:
            return norm2(p) > margin;
        case Hamiltonian::Kind::ReedsShepp:
            return std::abs(p[0] * std::cos(x[2]) + p[1] * std::sin(x[2])) > margin &&
                   std::abs(p[2]) > margin;
        case Hamiltonian::Kind::PursuitEvasion:
            return std::abs(p[0] * std::cos(x[2]) + p[1] * std::sin(x[2])) > margin &&
                   std::abs(p[0] * std::cos(x[3]) + p[1] * std::sin(x[3])) > margin &&
                   std::abs(p[2]) > margin && std::abs(p[3]) > margin;
        default:
            return true;
    }
}

std::vector<Hamiltonian> all_kinds() {
    return {Hamiltonian::eikonal_squared(), Hamiltonian::eikonal_norm(), Hamiltonian::quadratic(),
            Hamiltonian::reeds_shepp(1.0, 1.0), Hamiltonian::pursuit_evasion(0.8, 1.0, 1.0, 1.2)};
}

int probe_dim(const Hamiltonian& h) { return h.required_dim() == 0 ? 2 : h.required_dim(); }

}  // namespace

TEST_CASE("hand values") {
    const auto eik = Hamiltonian::eikonal_squared();
    CHECK(eik.eval(Point{0, 0}, Point{0.6, 0.8}) == doctest::Approx(0.0));
    CHECK(eik.eval(Point{0, 0}, Point{0, 0}) == doctest::Approx(-1.0));
    CHECK(eik.grad_p(Point{0, 0}, Point{1, 2}) == std::vector<double>{2, 4});

    const auto en = Hamiltonian::eikonal_norm();
    CHECK(en.grad_p(Point{0, 0}, Point{0, 0}) == std::vector<double>{0, 0});

    const auto quad = Hamiltonian::quadratic();
    CHECK(quad.grad_p(Point{0.0}, Point{3.0}) == std::vector<double>{3.0});
    CHECK(quad.eval(Point{1.0}, Point{2.0}) == doctest::Approx(2.5));

    // sigma |px cos w + py sin w| + |pw|/rho - 1 at w = 0, p = (1,0,0)
    const auto rs = Hamiltonian::reeds_shepp(1.0, 1.0);
    CHECK(rs.eval(Point{0.5, 0.5, 0.0}, Point{1, 0, 0}) == doctest::Approx(0.0));

    CHECK_THROWS_AS(rs.eval(Point{0, 0}, Point{0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(eik.eval(Point{0, 0}, Point{0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(Hamiltonian::reeds_shepp(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("closed-form C_H values") {
    CHECK(Hamiltonian::eikonal_squared().ch_bound(1.0) == doctest::Approx(2.0));
    CHECK(Hamiltonian::eikonal_norm().ch_bound(17.0) == doctest::Approx(1.0));
    CHECK(Hamiltonian::quadratic().ch_bound(5.0) == doctest::Approx(5.0));
    CHECK(Hamiltonian::reeds_shepp(1.0, 1.0).ch_bound(1.0) == doctest::Approx(std::sqrt(2.0)));
    const auto pe = Hamiltonian::pursuit_evasion(0.8, 1.0, 1.0, 1.2);
    CHECK(pe.ch_bound(2.0) ==
          doctest::Approx(std::sqrt(1.8 * 1.8 + 1.0 + 1.0 / (1.2 * 1.2))));
    CHECK_THROWS_AS(pe.ch_bound(0.0), std::invalid_argument);
}

TEST_CASE("grad_p matches finite differences away from kinks") {
    Rng rng(2024);
    for (const auto& h : all_kinds()) {
        const int d = probe_dim(h);
        int checked = 0;
        while (checked < 200) {
            Point x(d), p(d);
            for (int i = 0; i < d; ++i) {
                x[i] = rng.uniform(-2.0, 2.0);
                p[i] = rng.uniform(-2.0, 2.0);
            }
            if (!kink_free(h, x, p, 1e-4)) continue;
            const auto g = h.grad_p(x, p);
            const auto fd = fd_grad_p(h, x, p);
            for (int i = 0; i < d; ++i) {
                CHECK(std::abs(g[i] - fd[i]) <=
                      1e-6 * std::max({1.0, std::abs(g[i]), std::abs(fd[i])}));
            }
            ++checked;
        }
    }
}

TEST_CASE("ch_bound dominates the gradient norm on the L-ball") {
    Rng rng(77);
    const double L = 1.5;
    for (const auto& h : all_kinds()) {
        const int d = probe_dim(h);
        const double bound = h.ch_bound(L);
        for (int k = 0; k < 10000; ++k) {
            Point x(d), p(d);
            for (int i = 0; i < d; ++i) x[i] = rng.uniform(-3.0, 3.0);
            const double r = L * std::pow(rng.uniform(), 1.0 / d);
            Point v = geometry::unit_sphere_sample(rng, d);
            for (int i = 0; i < d; ++i) p[i] = r * v[i];
            CHECK(norm2(h.grad_p(x, p)) <= bound + 1e-12);
        }
    }
}

TEST_CASE("reeds-shepp positive homogeneity: H(x, s p) + 1 = s (H(x, p) + 1)") {
    const auto rs = Hamiltonian::reeds_shepp(1.3, 0.7);
    Rng rng(5);
    for (int k = 0; k < 1000; ++k) {
        Point x{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, 2 * M_PI)};
        Point p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const double s = rng.uniform(0.1, 5.0);
        Point sp = p;
        for (auto& v : sp) v *= s;
        CHECK(rs.eval(x, sp) + 1.0 == doctest::Approx(s * (rs.eval(x, p) + 1.0)).epsilon(1e-10));
    }
}
