#include "pebblewalk/kernels.hpp"

#include "pebblewalk/walks.hpp"

#include <doctest.h>

#include <random>
#include <vector>

using namespace pw;

TEST_CASE("scalar gather_axpy reference semantics") {
    std::vector<double> src = {1.0, 2.0, 3.0, 0.0};  // trailing pad slot
    std::vector<double> dst = {10.0, 10.0, 10.0};
    std::vector<std::uint32_t> idx = {2, 3, 0};
    kernels::gather_axpy_scalar(dst.data(), src.data(), idx.data(), 0.5, dst.size());
    CHECK(dst[0] == 11.5);
    CHECK(dst[1] == 10.0);  // pad slot contributes zero
    CHECK(dst[2] == 10.5);
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 variant is bitwise identical to scalar") {
    if (!__builtin_cpu_supports("avx2")) return;
    std::mt19937_64 gen(4242);
    std::uniform_real_distribution<double> val(-1e3, 1e3);
    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t n = 1 + gen() % 257;
        const std::size_t srclen = n + 1;
        std::vector<double> src(srclen);
        for (auto& v : src) v = val(gen);
        src.back() = 0.0;
        std::vector<std::uint32_t> idx(n);
        for (auto& v : idx) v = static_cast<std::uint32_t>(gen() % srclen);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = b[i] = val(gen);
        const double w = val(gen);
        kernels::gather_axpy_scalar(a.data(), src.data(), idx.data(), w, n);
        kernels::gather_axpy_avx2(b.data(), src.data(), idx.data(), w, n);
        CHECK(a == b);  // exact: both do one mul and one add per element
    }
}
#endif

TEST_CASE("dispatch honors forced variants") {
    kernels::force_kernel("scalar");
    CHECK(std::string(kernels::active_kernel()) == "scalar");
    const auto g1 = dp_step_distribution(WalkSpec::simple(2), 12, 12, GridMode::real);
    kernels::force_kernel("auto");
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) {
        CHECK(std::string(kernels::active_kernel()) == "avx2");
        const auto g2 = dp_step_distribution(WalkSpec::simple(2), 12, 12, GridMode::real);
        CHECK(g1.raw_real() == g2.raw_real());  // float DP is kernel-invariant, bit for bit
        CHECK(g1.truncation_massf() == g2.truncation_massf());
    }
#endif
    CHECK_THROWS_AS(kernels::force_kernel("neon"), Error);
}
