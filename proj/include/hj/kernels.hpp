#pragma once

#include <cstddef>
#include <vector>

namespace hj::kernels {

// Inner-loop primitives behind the network and optimizer. Every entry has a
// scalar reference implementation; vectorized variants are selected once at
// startup after a CPU feature check. HJSOLVE_KERNELS=scalar|avx2 overrides.
struct Backend {
    const char* name;

    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(std::size_t n, double alpha, const double* x, double* y);
    // y = W x + b with W row-major (rows x cols)
    void (*affine)(std::size_t rows, std::size_t cols, const double* w,
                   const double* x, const double* b, double* y);
    // y = max(z, 0)
    void (*relu)(std::size_t n, const double* z, double* y);
    // out = g where z > 0, else 0  (subgradient convention relu'(0) = 0)
    void (*relu_backprop)(std::size_t n, const double* z, const double* g, double* out);
    double (*sum_squares)(const double* x, std::size_t n);
    // Bias-corrected Adam step over n entries; c1 = 1 - beta1^k, c2 = 1 - beta2^k.
    void (*adam_step)(std::size_t n, double* theta, double* m, double* v,
                      const double* g, double eta, double beta1, double beta2,
                      double eps, double c1, double c2);
};

const Backend& scalar_backend();

/// Backend chosen at first use (cpuid + env override). Stable for the process.
const Backend& active();

/// All backends usable on this machine; first entry is the scalar reference.
std::vector<const Backend*> available();

}  // namespace hj::kernels
