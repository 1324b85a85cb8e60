// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include "wittenlab/kernels.hpp"

#include <immintrin.h>

namespace wlab::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Boundary columns and rows go through the scalar path.
inline double scalar_node(const StencilView& s, std::span<const double> u, std::size_t row,
                          std::size_t i) {
    const std::size_t nx = s.nx;
    const std::size_t ny = s.ny;
    const std::size_t idx = row * nx + i;
    const double ui = u[idx];
    std::size_t e = idx + 1;
    std::size_t w = idx - 1;
    if (i + 1 == nx) e = s.periodic ? row * nx : idx;
    if (i == 0) w = s.periodic ? row * nx + nx - 1 : idx;
    double acc = s.east[idx] * (u[e] - ui) + s.west[idx] * (u[w] - ui);
    if (ny > 1) {
        std::size_t n = idx + nx;
        std::size_t so = idx - nx;
        if (row + 1 == ny) n = s.periodic ? i : idx;
        if (row == 0) so = s.periodic ? (ny - 1) * nx + i : idx;
        acc += s.north[idx] * (u[n] - ui) + s.south[idx] * (u[so] - ui);
    }
    return acc;
}

} // namespace

void stencil_apply(const StencilView& s, std::span<const double> u, std::span<double> out) {
    const std::size_t nx = s.nx;
    const std::size_t ny = s.ny;
    const double* up = u.data();
    for (std::size_t row = 0; row < ny; ++row) {
        const bool interior_row = ny == 1 || (row > 0 && row + 1 < ny);
        if (!interior_row || nx < 6) {
            for (std::size_t i = 0; i < nx; ++i) out[row * nx + i] = scalar_node(s, u, row, i);
            continue;
        }
        const std::size_t base = row * nx;
        out[base] = scalar_node(s, u, row, 0);
        std::size_t i = 1;
        for (; i + 4 < nx; i += 4) {
            const std::size_t idx = base + i;
            const __m256d ui = _mm256_loadu_pd(up + idx);
            __m256d acc = _mm256_mul_pd(_mm256_loadu_pd(s.east.data() + idx),
                                        _mm256_sub_pd(_mm256_loadu_pd(up + idx + 1), ui));
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(s.west.data() + idx),
                                  _mm256_sub_pd(_mm256_loadu_pd(up + idx - 1), ui), acc);
            if (ny > 1) {
                acc = _mm256_fmadd_pd(_mm256_loadu_pd(s.north.data() + idx),
                                      _mm256_sub_pd(_mm256_loadu_pd(up + idx + nx), ui), acc);
                acc = _mm256_fmadd_pd(_mm256_loadu_pd(s.south.data() + idx),
                                      _mm256_sub_pd(_mm256_loadu_pd(up + idx - nx), ui), acc);
            }
            _mm256_storeu_pd(out.data() + idx, acc);
        }
        for (; i < nx; ++i) out[base + i] = scalar_node(s, u, row, i);
    }
}

double weighted_sum(std::span<const double> w, std::span<const double> a) {
    const std::size_t n = w.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + i), _mm256_loadu_pd(a.data() + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + i + 4),
                               _mm256_loadu_pd(a.data() + i + 4), acc1);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += w[i] * a[i];
    return acc;
}

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
    const std::size_t n = w.size();
    __m256d acc0 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w.data() + i), _mm256_loadu_pd(a.data() + i));
        acc0 = _mm256_fmadd_pd(wa, _mm256_loadu_pd(b.data() + i), acc0);
    }
    double acc = hsum(acc0);
    for (; i < n; ++i) acc += w[i] * a[i] * b[i];
    return acc;
}

void scaled_axpy(std::span<const double> w, std::span<const double> a, double alpha,
                 std::span<const double> b, std::span<double> out) {
    const std::size_t n = w.size();
    const __m256d al = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_fmadd_pd(al, _mm256_loadu_pd(b.data() + i), _mm256_loadu_pd(a.data() + i));
        _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(_mm256_loadu_pd(w.data() + i), t));
    }
    for (; i < n; ++i) out[i] = w[i] * (a[i] + alpha * b[i]);
}

} // namespace wlab::kernels::avx2
