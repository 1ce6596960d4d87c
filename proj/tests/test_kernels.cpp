#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hj/common.hpp"
#include "hj/kernels.hpp"

using namespace hj;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = scale * rng.uniform(-1.0, 1.0);
    return v;
}

bool close(double a, double b, double rel = 1e-12) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("scalar backend reference values") {
    const auto& k = kernels::scalar_backend();
    const std::vector<double> a{1.0, 2.0, 3.0};
    const std::vector<double> b{-1.0, 0.5, 2.0};
    CHECK(k.dot(a.data(), b.data(), 3) == doctest::Approx(6.0));
    CHECK(k.sum_squares(a.data(), 3) == doctest::Approx(14.0));

    std::vector<double> y{1.0, 1.0, 1.0};
    k.axpy(3, 2.0, a.data(), y.data());
    CHECK(y[0] == 3.0);
    CHECK(y[2] == 7.0);

    // y = W x + b with W = [[1,0],[0,1],[1,1]]
    const std::vector<double> w{1, 0, 0, 1, 1, 1};
    const std::vector<double> x{3.0, 4.0};
    const std::vector<double> bias{0.0, 1.0, -1.0};
    std::vector<double> out(3);
    k.affine(3, 2, w.data(), x.data(), bias.data(), out.data());
    CHECK(out[0] == 3.0);
    CHECK(out[1] == 5.0);
    CHECK(out[2] == 6.0);

    const std::vector<double> z{-1.0, 0.0, 2.0};
    std::vector<double> r(3);
    k.relu(3, z.data(), r.data());
    CHECK(r[0] == 0.0);
    CHECK(r[1] == 0.0);
    CHECK(r[2] == 2.0);

    // relu'(0) = 0: gradient blocked at exactly zero pre-activation.
    const std::vector<double> g{5.0, 5.0, 5.0};
    std::vector<double> masked(3);
    k.relu_backprop(3, z.data(), g.data(), masked.data());
    CHECK(masked[0] == 0.0);
    CHECK(masked[1] == 0.0);
    CHECK(masked[2] == 5.0);
}

TEST_CASE("vector backends agree with the scalar reference") {
    const auto backends = kernels::available();
    REQUIRE(!backends.empty());
    const auto& ref = kernels::scalar_backend();
    Rng rng(42);

    for (const auto* bk : backends) {
        for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 17u, 64u, 129u}) {
            const auto a = random_vec(rng, n, 2.0);
            const auto b = random_vec(rng, n, 2.0);
            CHECK(close(bk->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n)));
            CHECK(close(bk->sum_squares(a.data(), n), ref.sum_squares(a.data(), n)));

            auto y1 = random_vec(rng, n);
            auto y2 = y1;
            bk->axpy(n, 1.7, a.data(), y1.data());
            ref.axpy(n, 1.7, a.data(), y2.data());
            for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i]));

            std::vector<double> r1(n), r2(n);
            bk->relu(n, a.data(), r1.data());
            ref.relu(n, a.data(), r2.data());
            CHECK(r1 == r2);

            bk->relu_backprop(n, a.data(), b.data(), r1.data());
            ref.relu_backprop(n, a.data(), b.data(), r2.data());
            CHECK(r1 == r2);
        }

        // affine on a rectangular matrix
        const std::size_t rows = 13, cols = 37;
        const auto w = random_vec(rng, rows * cols);
        const auto x = random_vec(rng, cols);
        const auto bias = random_vec(rng, rows);
        std::vector<double> o1(rows), o2(rows);
        bk->affine(rows, cols, w.data(), x.data(), bias.data(), o1.data());
        ref.affine(rows, cols, w.data(), x.data(), bias.data(), o2.data());
        for (std::size_t i = 0; i < rows; ++i) CHECK(close(o1[i], o2[i]));

        // one Adam step from identical state
        const std::size_t n = 23;
        auto th1 = random_vec(rng, n), m1 = random_vec(rng, n, 0.1), v1 = random_vec(rng, n, 0.1);
        for (auto& vi : v1) vi = std::abs(vi);
        auto th2 = th1, m2 = m1, v2 = v1;
        const auto g = random_vec(rng, n);
        bk->adam_step(n, th1.data(), m1.data(), v1.data(), g.data(), 1e-3, 0.9, 0.999, 1e-8,
                      0.1, 0.001999);
        ref.adam_step(n, th2.data(), m2.data(), v2.data(), g.data(), 1e-3, 0.9, 0.999, 1e-8,
                      0.1, 0.001999);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(close(th1[i], th2[i]));
            CHECK(close(m1[i], m2[i]));
            CHECK(close(v1[i], v2[i]));
        }
    }
}

TEST_CASE("active backend is one of the available ones") {
    const auto& act = kernels::active();
    bool found = false;
    for (const auto* bk : kernels::available()) {
        if (bk == &act) found = true;
    }
    CHECK(found);
}
