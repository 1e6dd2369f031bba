#include "pebblewalk/kernels.hpp"

#include "pebblewalk/core.hpp"

#include <cstdlib>
#include <cstring>

namespace pw::kernels {

namespace {

using Fn = void (*)(double*, const double*, const std::uint32_t*, double, std::size_t);

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

struct Dispatch {
    Fn fn;
    const char* name;
};

Dispatch resolve_auto() {
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_available()) return {gather_axpy_avx2, "avx2"};
#endif
    return {gather_axpy_scalar, "scalar"};
}

Dispatch resolve_named(const char* name) {
    if (std::strcmp(name, "auto") == 0) return resolve_auto();
    if (std::strcmp(name, "scalar") == 0) return {gather_axpy_scalar, "scalar"};
    if (std::strcmp(name, "avx2") == 0) {
#if defined(__x86_64__) || defined(_M_X64)
        if (avx2_available()) return {gather_axpy_avx2, "avx2"};
#endif
        pw::fail(pw::Errc::validation, "avx2 kernel requested but this CPU does not support AVX2");
    }
    pw::fail(pw::Errc::validation, std::string("unknown kernel variant '") + name + "'");
}

Dispatch& current() {
    static Dispatch d = [] {
        if (const char* env = std::getenv("PEBBLEWALK_KERNEL")) return resolve_named(env);
        return resolve_auto();
    }();
    return d;
}

}  // namespace

void gather_axpy(double* dst, const double* src, const std::uint32_t* idx, double w, std::size_t n) {
    current().fn(dst, src, idx, w, n);
}

const char* active_kernel() { return current().name; }

void force_kernel(const char* name) { current() = resolve_named(name); }

}  // namespace pw::kernels
