#include "wittenlab/operators.hpp"

#include <algorithm>
#include <cmath>

namespace wlab {

namespace {

// Neighbour of node i shifted by `step` along `axis`; wraps on the torus.
std::size_t shifted(const GridSpec& grid, std::size_t i, int axis, int step) {
    const int ix = grid.axis_index(i, 0);
    if (grid.dimension() == 1) return grid.index(ix + step);
    const int iy = grid.axis_index(i, 1);
    return axis == 0 ? grid.index(ix + step, iy) : grid.index(ix, iy + step);
}

Field first_derivative(std::span<const double> u, const GridSpec& grid, int axis) {
    const int N = grid.points_per_axis();
    const double h = grid.spacing();
    Field out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const int k = grid.axis_index(i, axis);
        auto at = [&](int s) { return u[shifted(grid, i, axis, s)]; };
        if (grid.periodic() || (k > 0 && k < N - 1))
            out[i] = (at(1) - at(-1)) / (2.0 * h);
        else if (k == 0)
            out[i] = (-3.0 * u[i] + 4.0 * at(1) - at(2)) / (2.0 * h);
        else
            out[i] = (3.0 * u[i] - 4.0 * at(-1) + at(-2)) / (2.0 * h);
    }
    return out;
}

Field second_derivative(std::span<const double> u, const GridSpec& grid, int axis) {
    const int N = grid.points_per_axis();
    const double h2 = grid.spacing() * grid.spacing();
    Field out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const int k = grid.axis_index(i, axis);
        auto at = [&](int s) { return u[shifted(grid, i, axis, s)]; };
        if (grid.periodic() || (k > 0 && k < N - 1))
            out[i] = (at(1) - 2.0 * u[i] + at(-1)) / h2;
        else if (k == 0)
            out[i] = (2.0 * u[i] - 5.0 * at(1) + 4.0 * at(2) - at(3)) / h2;
        else
            out[i] = (2.0 * u[i] - 5.0 * at(-1) + 4.0 * at(-2) - at(-3)) / h2;
    }
    return out;
}

// Flat gradient of the log-factor a(t, .) at node x; zero unless conformal.
std::array<double, 2> log_factor_gradient(const MetricFamily& metric, double t, Point x, double h) {
    if (metric.variant() != MetricVariant::conformal_2d) return {0.0, 0.0};
    auto a = [&](double dx, double dy) { return metric.log_factor(t, Point{x[0] + dx, x[1] + dy}); };
    return {(a(h, 0.0) - a(-h, 0.0)) / (2.0 * h), (a(0.0, h) - a(0.0, -h)) / (2.0 * h)};
}

} // namespace

std::array<Field, 2> partials(std::span<const double> u, const GridSpec& grid) {
    if (u.size() != grid.size()) throw PreconditionError("field size does not match the grid");
    std::array<Field, 2> d;
    d[0] = first_derivative(u, grid, 0);
    d[1] = grid.dimension() == 2 ? first_derivative(u, grid, 1) : Field(u.size(), 0.0);
    return d;
}

Field gradient_dot(std::span<const double> u, std::span<const double> v, const GridSpec& grid,
                   const MetricFamily& metric, double t) {
    const auto du = partials(u, grid);
    const auto dv = partials(v, grid);
    Field out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        out[i] = (du[0][i] * dv[0][i] + du[1][i] * dv[1][i]) / metric.factor(t, grid.node(i));
    return out;
}

Field gradient_sq(std::span<const double> u, const GridSpec& grid, const MetricFamily& metric,
                  double t) {
    const auto du = partials(u, grid);
    Field out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        out[i] = (du[0][i] * du[0][i] + du[1][i] * du[1][i]) / metric.factor(t, grid.node(i));
    return out;
}

Field gradient_sq(std::span<const double> u, const FlowScenario& scenario, double t) {
    return gradient_sq(u, scenario.grid(), scenario.metric(), t);
}

SymTensorField hessian(std::span<const double> u, const GridSpec& grid, const MetricFamily& metric,
                       double t) {
    const int n = grid.dimension();
    const auto du = partials(u, grid);
    const Field uxx = second_derivative(u, grid, 0);
    Field uyy, uxy;
    if (n == 2) {
        uyy = second_derivative(u, grid, 1);
        uxy = first_derivative(du[0], grid, 1);
    }
    SymTensorField out(n, u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        Sym2& H = out[i];
        H.xx = uxx[i];
        if (n == 1) continue;
        H.yy = uyy[i];
        H.xy = uxy[i];
        const auto a = log_factor_gradient(metric, t, grid.node(i), grid.spacing());
        const double ux = du[0][i];
        const double uy = du[1][i];
        const double dot = a[0] * ux + a[1] * uy;
        H.xx += -2.0 * a[0] * ux + dot;
        H.yy += -2.0 * a[1] * uy + dot;
        H.xy += -(a[0] * uy + a[1] * ux);
    }
    return out;
}

SymTensorField hessian(std::span<const double> u, const FlowScenario& scenario, double t) {
    return hessian(u, scenario.grid(), scenario.metric(), t);
}

double tensor_norm_sq(const Sym2& T, double g, int dimension) noexcept {
    const double flat = dimension == 1 ? T.xx * T.xx
                                       : T.xx * T.xx + 2.0 * T.xy * T.xy + T.yy * T.yy;
    return flat / (g * g);
}

double tensor_contract(const Sym2& T, double ux, double uy, double g, int dimension) noexcept {
    const double flat = dimension == 1 ? T.xx * ux * ux
                                       : T.xx * ux * ux + 2.0 * T.xy * ux * uy + T.yy * uy * uy;
    return flat / (g * g);
}

Field gamma2(std::span<const double> u, const FlowScenario& scenario, double t) {
    const WittenOperator L(scenario, t);
    const Field grad_sq = gradient_sq(u, scenario, t);
    Field out = L.apply(grad_sq);
    const Field lu = L.apply(u);
    const Field cross = gradient_dot(u, lu, scenario.grid(), scenario.metric(), t);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * out[i] - cross[i];
    return out;
}

Field gamma2_direct(std::span<const double> u, const FlowScenario& scenario, double t) {
    const GridSpec& grid = scenario.grid();
    const int n = grid.dimension();
    const SymTensorField H = hessian(u, scenario, t);
    const SymTensorField ric = bakry_emery_ricci(scenario, t, ModelDimension::infinite());
    const auto du = partials(u, grid);
    Field out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double g = scenario.factor(t, grid.node(i));
        out[i] = tensor_norm_sq(H[i], g, n) + tensor_contract(ric[i], du[0][i], du[1][i], g, n);
    }
    return out;
}

double bochner_residual(std::span<const double> u, const FlowScenario& scenario, double t) {
    const Field a = gamma2(u, scenario, t);
    const Field b = gamma2_direct(u, scenario, t);
    const GridSpec& grid = scenario.grid();
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (grid.wall_distance(i) >= 2) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

} // namespace wlab
