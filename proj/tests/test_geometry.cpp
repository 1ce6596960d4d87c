#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hj/geometry.hpp"

using namespace hj;
using namespace hj::geometry;

namespace {

double norm(const Point& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

double norm_inf_pt(const Point& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST_CASE("cube interior containment") {
    const auto dom = Domain::cube(Point(2, 0.0), 3.0);
    const auto pts = sample_interior(dom, {SamplerKind::UniformInterior, 1, 0.0, {}}, 4);
    REQUIRE(pts.size() == 4);
    for (const auto& x : pts) CHECK(norm_inf_pt(x) < 3.0);
}

TEST_CASE("radially uniform ball: mean radius and KS statistic") {
    const auto dom = Domain::ball(Point(10, 0.0), 6.0);
    const int n = 100000;
    const auto pts = sample_interior(dom, {SamplerKind::RadiallyUniform, 7, 0.0, {}}, n);

    // r ~ Unif(0,6) has mean 3 and sd 6/sqrt(12); allow 4 sigma of the mean.
    double mean = 0.0;
    std::vector<double> radii(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        radii[i] = norm(pts[i]);
        mean += radii[i];
    }
    mean /= n;
    const double tol = 4.0 * (6.0 / std::sqrt(12.0)) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean - 3.0) < tol);

    // Empirical CDF of |x| against Unif(0,6).
    std::sort(radii.begin(), radii.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double f = radii[i] / 6.0;
        ks = std::max(ks, std::abs((i + 1.0) / n - f));
        ks = std::max(ks, std::abs(static_cast<double>(i) / n - f));
    }
    CHECK(ks < 0.02);
}

TEST_CASE("annulus interior containment in d=5") {
    const auto dom = Domain::annulus(Point(5, 0.0), 2.0, 6.0);
    const auto pts = sample_interior(dom, {SamplerKind::UniformInterior, 3, 0.0, {}}, 1000);
    for (const auto& x : pts) {
        const double r = norm(x);
        CHECK(r > 2.0);
        CHECK(r < 6.0);
    }
}

TEST_CASE("uniform cube sampling is centered") {
    const auto dom = Domain::cube(Point{1.0, -2.0}, 3.0);
    const int n = 100000;
    const auto pts = sample_interior(dom, {SamplerKind::UniformInterior, 11, 0.0, {}}, n);
    const double sigma = (6.0 / std::sqrt(12.0)) / std::sqrt(static_cast<double>(n));
    for (int c = 0; c < 2; ++c) {
        double mean = 0.0;
        for (const auto& x : pts) mean += x[c];
        mean /= n;
        CHECK(std::abs(mean - dom.center()[c]) < 4.0 * sigma);
    }
}

TEST_CASE("boundary samples satisfy their tag equation to 1e-12") {
    SUBCASE("cube faces") {
        const auto dom = Domain::cube(Point(2, 0.0), 3.0);
        const auto pts = sample_boundary(dom, {SamplerKind::UniformBoundary, 5, 0.0, {}}, 100);
        for (const auto& bp : pts) {
            CHECK(std::abs(norm_inf_pt(bp.x) - 3.0) <= 1e-12);
            const int axis = bp.tag / 2;
            const double side = bp.tag % 2 == 0 ? -3.0 : 3.0;
            CHECK(bp.x[axis] == doctest::Approx(side).epsilon(1e-12));
        }
    }
    SUBCASE("annulus shells") {
        const auto dom = Domain::annulus(Point(2, 0.0), 2.0, 6.0);
        const auto pts = sample_boundary(dom, {SamplerKind::UniformBoundary, 5, 0.0, {}}, 100);
        bool saw_inner = false, saw_outer = false;
        for (const auto& bp : pts) {
            REQUIRE((bp.tag == 0 || bp.tag == 1));
            const double r = bp.tag == 0 ? 2.0 : 6.0;
            if (bp.tag == 0) saw_inner = true;
            if (bp.tag == 1) saw_outer = true;
            CHECK(std::abs(norm(bp.x) - r) <= 1e-12);
        }
        CHECK(saw_inner);
        CHECK(saw_outer);
    }
    SUBCASE("torus product: periodic coordinate is never a boundary") {
        const auto dom = Domain::product_with_torus(Domain::annulus(Point(2, 0.0), 0.2, 5.0), 1);
        const auto pts = sample_boundary(dom, {SamplerKind::UniformBoundary, 5, 0.0, {}}, 10);
        for (const auto& bp : pts) {
            const double r = std::hypot(bp.x[0], bp.x[1]);
            const double shell = bp.tag == 0 ? 0.2 : 5.0;
            CHECK(std::abs(r - shell) <= 1e-12);
            CHECK(bp.x[2] >= 0.0);
            CHECK(bp.x[2] < 2.0 * M_PI);
        }
    }
}

TEST_CASE("contains and on_boundary are mutually exclusive at tiny tol") {
    const auto dom = Domain::annulus(Point(2, 0.0), 2.0, 6.0);
    const auto bnd = sample_boundary(dom, {SamplerKind::UniformBoundary, 19, 0.0, {}}, 50);
    for (const auto& bp : bnd) {
        CHECK(dom.on_boundary(bp.x, 1e-9));
        CHECK(!dom.contains(bp.x));
    }
    const auto in = sample_interior(dom, {SamplerKind::UniformInterior, 19, 0.0, {}}, 50);
    for (const auto& x : in) {
        CHECK(dom.contains(x));
        CHECK(!dom.on_boundary(x, 1e-9));
    }
}

TEST_CASE("nearest neighbor delta") {
    CHECK(nearest_neighbor_delta({{0.0}, {1.0}}) == doctest::Approx(1.0));
    // 0 -> 0.25, 0.25 -> 0.25, 1 -> 0.75; the max is 0.75
    CHECK(nearest_neighbor_delta({{0.0}, {0.25}, {1.0}}) == doctest::Approx(0.75));
    CHECK_THROWS_AS(nearest_neighbor_delta({{0.0}}), std::invalid_argument);

    // Growing a nested uniform sample tightens the spacing.
    const auto dom = Domain::cube(Point{0.5, 0.5}, 0.5);
    const auto pts = sample_interior(dom, {SamplerKind::UniformInterior, 23, 0.0, {}}, 1000);
    double prev = 1e300;
    for (std::size_t n : {125u, 250u, 500u, 1000u}) {
        const std::vector<Point> sub(pts.begin(), pts.begin() + n);
        const double v = nearest_neighbor_delta(sub);
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("determinism and sampler validation") {
    const auto dom = Domain::ball(Point(3, 0.0), 2.0);
    const SamplerSpec spec{SamplerKind::UniformInterior, 99, 0.0, {}};
    CHECK(sample_interior(dom, spec, 50) == sample_interior(dom, spec, 50));

    const auto cube = Domain::cube(Point(2, 0.0), 1.0);
    CHECK_THROWS_AS(sample_interior(cube, {SamplerKind::RadiallyUniform, 0, 0.0, {}}, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample_interior(cube, spec, 0), std::invalid_argument);
}

TEST_CASE("grid nodes sampler enumerates the interior lattice") {
    const auto dom = Domain::cube(Point{0.0}, 1.0);
    SamplerSpec spec{SamplerKind::GridNodes, 0, 0.5, {}};
    const auto pts = sample_interior(dom, spec, 100);
    REQUIRE(pts.size() == 3);
    CHECK(pts[0][0] == doctest::Approx(-0.5));
    CHECK(pts[1][0] == doctest::Approx(0.0));
    CHECK(pts[2][0] == doctest::Approx(0.5));
}

TEST_CASE("domain constructor validation") {
    CHECK_THROWS_AS(Domain::cube(Point(2, 0.0), -1.0), std::invalid_argument);
    CHECK_THROWS_AS(Domain::annulus(Point(2, 0.0), 3.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(Domain::annulus(Point(2, 0.0), 0.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(
        Domain::product_with_torus(
            Domain::product_with_torus(Domain::ball(Point(2, 0.0), 1.0), 1), 1),
        std::invalid_argument);
}
