#include "hj/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace hj::kernels {

#ifdef HJ_HAVE_AVX2_TU
const Backend& avx2_backend();

static bool cpu_has_avx2() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

std::vector<const Backend*> available() {
    std::vector<const Backend*> out{&scalar_backend()};
#ifdef HJ_HAVE_AVX2_TU
    if (cpu_has_avx2()) out.push_back(&avx2_backend());
#endif
    return out;
}

static const Backend* select() {
    const char* force = std::getenv("HJSOLVE_KERNELS");
    if (force != nullptr) {
        for (const Backend* b : available()) {
            if (std::strcmp(force, b->name) == 0) return b;
        }
        // Unknown or unsupported name falls back to the reference kernels.
        return &scalar_backend();
    }
    const auto all = available();
    return all.back();
}

const Backend& active() {
    static const Backend* chosen = select();
    return *chosen;
}

}  // namespace hj::kernels
