#pragma once

#include <cstddef>
#include <cstdint>

namespace pw::kernels {

/// dst[i] += w * src[idx[i]] for i in [0, n).
///
/// The inner loop of float-mode distribution convolution: every output cell
/// pulls from its shifted source cell through a precomputed index table.
/// Index entries may point at a trailing zero pad slot of src, which makes
/// ball-boundary handling branch-free. All variants perform one multiply and
/// one add per element in index order (no FMA contraction), so scalar and
/// SIMD results are bitwise identical; the equivalence suite asserts exact
/// equality.
void gather_axpy(double* dst, const double* src, const std::uint32_t* idx, double w, std::size_t n);

void gather_axpy_scalar(double* dst, const double* src, const std::uint32_t* idx, double w,
                        std::size_t n);
#if defined(__x86_64__) || defined(_M_X64)
void gather_axpy_avx2(double* dst, const double* src, const std::uint32_t* idx, double w,
                      std::size_t n);
#endif

/// Name of the variant gather_axpy dispatches to: "avx2" or "scalar".
/// Resolution order: PEBBLEWALK_KERNEL env var (scalar|avx2|auto), then CPU
/// feature detection.
const char* active_kernel();

/// Test hook: force a variant ("scalar", "avx2", "auto"). Throws if the
/// requested variant is unavailable on this machine.
void force_kernel(const char* name);

}  // namespace pw::kernels
