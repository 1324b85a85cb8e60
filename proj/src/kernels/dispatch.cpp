#include "wittenlab/kernels.hpp"

#include <atomic>

namespace wlab::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(WITTENLAB_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend detect() noexcept { return cpu_has_avx2() ? Backend::avx2 : Backend::scalar; }

std::atomic<Backend>& current() noexcept {
    static std::atomic<Backend> backend{detect()};
    return backend;
}

} // namespace

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

bool backend_available(Backend backend) noexcept {
    return backend == Backend::scalar || cpu_has_avx2();
}

bool set_backend(Backend backend) noexcept {
    if (!backend_available(backend)) return false;
    current().store(backend, std::memory_order_relaxed);
    return true;
}

std::string_view backend_name(Backend backend) noexcept {
    switch (backend) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    }
    return "unknown";
}

#if defined(WITTENLAB_HAVE_AVX2)
#define WLAB_DISPATCH(fn, ...)                                                                     \
    (active_backend() == Backend::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define WLAB_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void stencil_apply(const StencilView& stencil, std::span<const double> u, std::span<double> out) {
    WLAB_DISPATCH(stencil_apply, stencil, u, out);
}

double weighted_sum(std::span<const double> w, std::span<const double> a) {
    return WLAB_DISPATCH(weighted_sum, w, a);
}

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
    return WLAB_DISPATCH(weighted_dot, w, a, b);
}

void scaled_axpy(std::span<const double> w, std::span<const double> a, double alpha,
                 std::span<const double> b, std::span<double> out) {
    WLAB_DISPATCH(scaled_axpy, w, a, alpha, b, out);
}

#undef WLAB_DISPATCH

} // namespace wlab::kernels
