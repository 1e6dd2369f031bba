#include "pebblewalk/kernels.hpp"

namespace pw::kernels {

void gather_axpy_scalar(double* dst, const double* src, const std::uint32_t* idx, double w,
                        std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        dst[i] += w * src[idx[i]];
    }
}

}  // namespace pw::kernels
