// Compiled with -mavx2; only entered after runtime CPU detection.
#if defined(__x86_64__) || defined(_M_X64)

#include "pebblewalk/kernels.hpp"

#include <immintrin.h>

namespace pw::kernels {

void gather_axpy_avx2(double* dst, const double* src, const std::uint32_t* idx, double w,
                      std::size_t n) {
    const __m256d vw = _mm256_set1_pd(w);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
        const __m256d g = _mm256_i32gather_pd(src, vi, 8);
        const __m256d d = _mm256_loadu_pd(dst + i);
        // mul then add, matching the scalar variant's rounding exactly
        _mm256_storeu_pd(dst + i, _mm256_add_pd(d, _mm256_mul_pd(vw, g)));
    }
    for (; i < n; ++i) {
        dst[i] += w * src[idx[i]];
    }
}

}  // namespace pw::kernels

#endif
