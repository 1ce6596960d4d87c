#include "hj/kernels.hpp"

#include <cmath>

namespace hj::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_scalar(std::size_t n, double alpha, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void affine_scalar(std::size_t rows, std::size_t cols, const double* w,
                   const double* x, const double* b, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        y[r] = b[r] + dot_scalar(w + r * cols, x, cols);
    }
}

void relu_scalar(std::size_t n, const double* z, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_backprop_scalar(std::size_t n, const double* z, const double* g, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = z[i] > 0.0 ? g[i] : 0.0;
}

double sum_squares_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

void adam_step_scalar(std::size_t n, double* theta, double* m, double* v,
                      const double* g, double eta, double beta1, double beta2,
                      double eps, double c1, double c2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        const double mhat = m[i] / c1;
        const double vhat = v[i] / c2;
        theta[i] -= eta * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace

const Backend& scalar_backend() {
    static const Backend backend{
        "scalar",        dot_scalar,  axpy_scalar,        affine_scalar,
        relu_scalar,     relu_backprop_scalar, sum_squares_scalar, adam_step_scalar,
    };
    return backend;
}

}  // namespace hj::kernels
