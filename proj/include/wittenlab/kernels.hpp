#pragma once

// Data-parallel inner loops shared by the operator, propagator and quadrature
// code. Each kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The variant is picked once at startup from CPUID and can
// be overridden for equivalence testing.

#include <cstddef>
#include <span>
#include <string_view>

namespace wlab::kernels {

enum class Backend { scalar, avx2 };

/// Backend currently used by the dispatching entry points.
Backend active_backend() noexcept;

/// True when the CPU and the build both support `backend`.
bool backend_available(Backend backend) noexcept;

/// Force a backend. Returns false (and changes nothing) if it is unavailable.
bool set_backend(Backend backend) noexcept;

std::string_view backend_name(Backend backend) noexcept;

/// Five-point (or three-point when `ny == 1`) variable-coefficient stencil in
/// difference form on an `nx` by `ny` grid stored row-major (x fastest):
///
///   out[i] = east[i]*(u[i+1]-u[i]) + west[i]*(u[i-1]-u[i])
///          + north[i]*(u[i+nx]-u[i]) + south[i]*(u[i-nx]-u[i])
///
/// Neighbour indices wrap when `periodic` is set; otherwise the caller must
/// store zero coefficients on boundary-crossing links. `north`/`south` are
/// ignored when `ny == 1`. The difference form makes constants map to zero
/// exactly.
struct StencilView {
    std::size_t nx = 0;
    std::size_t ny = 1;
    bool periodic = false;
    std::span<const double> east;
    std::span<const double> west;
    std::span<const double> north;
    std::span<const double> south;
};

void stencil_apply(const StencilView& stencil, std::span<const double> u, std::span<double> out);

/// sum_i w[i] * a[i]
double weighted_sum(std::span<const double> w, std::span<const double> a);

/// sum_i w[i] * a[i] * b[i]
double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);

/// out[i] = w[i] * (a[i] + alpha * b[i])
void scaled_axpy(std::span<const double> w, std::span<const double> a, double alpha,
                 std::span<const double> b, std::span<double> out);

namespace scalar {
void stencil_apply(const StencilView& stencil, std::span<const double> u, std::span<double> out);
double weighted_sum(std::span<const double> w, std::span<const double> a);
double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);
void scaled_axpy(std::span<const double> w, std::span<const double> a, double alpha,
                 std::span<const double> b, std::span<double> out);
} // namespace scalar

#if defined(WITTENLAB_HAVE_AVX2)
namespace avx2 {
void stencil_apply(const StencilView& stencil, std::span<const double> u, std::span<double> out);
double weighted_sum(std::span<const double> w, std::span<const double> a);
double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);
void scaled_axpy(std::span<const double> w, std::span<const double> a, double alpha,
                 std::span<const double> b, std::span<double> out);
} // namespace avx2
#endif

} // namespace wlab::kernels
