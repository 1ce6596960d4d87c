// AVX2/FMA variants of the scalar kernels. This TU is built with -mavx2 -mfma;
// the dispatcher only hands these out after __builtin_cpu_supports checks.

#include "hj/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace hj::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_avx2(std::size_t n, double alpha, const double* x, double* y) {
    const __m256d av = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yv = _mm256_loadu_pd(y + i);
        yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
        _mm256_storeu_pd(y + i, yv);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void affine_avx2(std::size_t rows, std::size_t cols, const double* w,
                 const double* x, const double* b, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        y[r] = b[r] + dot_avx2(w + r * cols, x, cols);
    }
}

void relu_avx2(std::size_t n, const double* z, double* y) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(z + i), zero));
    }
    for (; i < n; ++i) y[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_backprop_avx2(std::size_t n, const double* z, const double* g, double* out) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(z + i), zero, _CMP_GT_OQ);
        _mm256_storeu_pd(out + i, _mm256_and_pd(mask, _mm256_loadu_pd(g + i)));
    }
    for (; i < n; ++i) out[i] = z[i] > 0.0 ? g[i] : 0.0;
}

double sum_squares_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

void adam_step_avx2(std::size_t n, double* theta, double* m, double* v,
                    const double* g, double eta, double beta1, double beta2,
                    double eps, double c1, double c2) {
    const __m256d b1 = _mm256_set1_pd(beta1);
    const __m256d b2 = _mm256_set1_pd(beta2);
    const __m256d ob1 = _mm256_set1_pd(1.0 - beta1);
    const __m256d ob2 = _mm256_set1_pd(1.0 - beta2);
    const __m256d ev = _mm256_set1_pd(eta);
    const __m256d epsv = _mm256_set1_pd(eps);
    const __m256d ic1 = _mm256_set1_pd(1.0 / c1);
    const __m256d ic2 = _mm256_set1_pd(1.0 / c2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d gv = _mm256_loadu_pd(g + i);
        __m256d mv = _mm256_fmadd_pd(b1, _mm256_loadu_pd(m + i), _mm256_mul_pd(ob1, gv));
        __m256d vv = _mm256_fmadd_pd(b2, _mm256_loadu_pd(v + i),
                                     _mm256_mul_pd(ob2, _mm256_mul_pd(gv, gv)));
        _mm256_storeu_pd(m + i, mv);
        _mm256_storeu_pd(v + i, vv);
        const __m256d mhat = _mm256_mul_pd(mv, ic1);
        const __m256d vhat = _mm256_mul_pd(vv, ic2);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), epsv);
        __m256d th = _mm256_loadu_pd(theta + i);
        th = _mm256_sub_pd(th, _mm256_div_pd(_mm256_mul_pd(ev, mhat), denom));
        _mm256_storeu_pd(theta + i, th);
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        theta[i] -= eta * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
}

}  // namespace

const Backend& avx2_backend() {
    static const Backend backend{
        "avx2",     dot_avx2,  axpy_avx2,          affine_avx2,
        relu_avx2,  relu_backprop_avx2, sum_squares_avx2, adam_step_avx2,
    };
    return backend;
}

}  // namespace hj::kernels
