#include "wittenlab/kernels.hpp"

namespace wlab::kernels::scalar {

namespace {

// Contribution of one row of the stencil, x-links only.
inline double x_links(const StencilView& s, std::span<const double> u, std::size_t row,
                      std::size_t i) {
    const std::size_t nx = s.nx;
    const std::size_t idx = row * nx + i;
    const double ui = u[idx];
    std::size_t e = idx + 1;
    std::size_t w = idx - 1;
    if (i + 1 == nx) e = s.periodic ? row * nx : idx;
    if (i == 0) w = s.periodic ? row * nx + nx - 1 : idx;
    return s.east[idx] * (u[e] - ui) + s.west[idx] * (u[w] - ui);
}

inline double y_links(const StencilView& s, std::span<const double> u, std::size_t row,
                      std::size_t i) {
    const std::size_t nx = s.nx;
    const std::size_t ny = s.ny;
    const std::size_t idx = row * nx + i;
    const double ui = u[idx];
    std::size_t n = idx + nx;
    std::size_t so = idx - nx;
    if (row + 1 == ny) n = s.periodic ? i : idx;
    if (row == 0) so = s.periodic ? (ny - 1) * nx + i : idx;
    return s.north[idx] * (u[n] - ui) + s.south[idx] * (u[so] - ui);
}

} // namespace

void stencil_apply(const StencilView& s, std::span<const double> u, std::span<double> out) {
    for (std::size_t row = 0; row < s.ny; ++row) {
        for (std::size_t i = 0; i < s.nx; ++i) {
            double acc = x_links(s, u, row, i);
            if (s.ny > 1) acc += y_links(s, u, row, i);
            out[row * s.nx + i] = acc;
        }
    }
}

double weighted_sum(std::span<const double> w, std::span<const double> a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * a[i];
    return acc;
}

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * a[i] * b[i];
    return acc;
}

void scaled_axpy(std::span<const double> w, std::span<const double> a, double alpha,
                 std::span<const double> b, std::span<double> out) {
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] * (a[i] + alpha * b[i]);
}

} // namespace wlab::kernels::scalar
