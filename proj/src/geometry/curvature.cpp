#include "wittenlab/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace wlab {

namespace {

struct Jet {
    double value = 0.0;
    std::array<double, 2> grad{};
    Sym2 hess{};
};

// Second-order central stencils on an analytic function of x.
template <class Fn>
Jet stencil_jet(Fn&& fn, Point x, double h, int dimension) {
    Jet j;
    j.value = fn(x);
    const double f0 = j.value;
    auto shifted = [&](double dx, double dy) { return fn(Point{x[0] + dx, x[1] + dy}); };
    const double fe = shifted(h, 0.0);
    const double fw = shifted(-h, 0.0);
    j.grad[0] = (fe - fw) / (2.0 * h);
    j.hess.xx = (fe - 2.0 * f0 + fw) / (h * h);
    if (dimension == 2) {
        const double fn_ = shifted(0.0, h);
        const double fs = shifted(0.0, -h);
        j.grad[1] = (fn_ - fs) / (2.0 * h);
        j.hess.yy = (fn_ - 2.0 * f0 + fs) / (h * h);
        j.hess.xy = (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) /
                    (4.0 * h * h);
    }
    return j;
}

Jet log_factor_jet(const MetricFamily& metric, double t, Point x, double h, int dimension) {
    if (metric.variant() != MetricVariant::conformal_2d) {
        Jet j;
        j.value = metric.log_factor(t, x);
        return j;
    }
    return stencil_jet([&](Point p) { return metric.log_factor(t, p); }, x, h, dimension);
}

Jet potential_jet(const FlowScenario& s, double t, Point x) {
    return stencil_jet([&](Point p) { return s.phi(t, p); }, x, s.grid().spacing(),
                       s.dimension());
}

// Hess_g phi for g = exp(2a) delta: d_ij phi - a_i phi_j - a_j phi_i + delta_ij <da, dphi>.
Sym2 conformal_hessian(const Jet& phi, const Jet& a, int dimension) {
    Sym2 h = phi.hess;
    const double ax = a.grad[0];
    const double px = phi.grad[0];
    if (dimension == 1) {
        h.xx -= ax * px;
        return h;
    }
    const double ay = a.grad[1];
    const double py = phi.grad[1];
    const double dot = ax * px + ay * py;
    h.xx += -2.0 * ax * px + dot;
    h.yy += -2.0 * ay * py + dot;
    h.xy += -(ax * py + ay * px);
    return h;
}

void check_dimension(const FlowScenario& s, ModelDimension m) {
    if (m.is_infinite()) return;
    const double n = s.dimension();
    if (m.value() < n)
        throw InvalidDimensionError("m = " + m.str() + " is below the manifold dimension " +
                                    std::to_string(s.dimension()));
    if (m.value() == n && !s.potential_constant_in_space())
        throw ConventionError("m = n is only meaningful for a constant potential (L = Laplacian)");
}

} // namespace

Field metric_at(const MetricFamily& metric, const GridSpec& grid, double t) {
    return sample(grid, [&](Point x) { return metric.factor(t, x); });
}

WeightedMeasure measure_weights(const GridSpec& grid, const MetricFamily& metric,
                                const PotentialFamily& potential, double t) {
    const int n = grid.dimension();
    const double cell = grid.cell_volume();
    WeightedMeasure mu;
    mu.weights = sample(grid, [&](Point x) {
        // e^{-phi} sqrt(det g) = exp(-phi + n a)
        const double expo = -potential_value(metric, potential, n, t, x) + n * metric.log_factor(t, x);
        return std::exp(expo) * cell;
    });
    return mu;
}

WeightedMeasure measure_weights(const FlowScenario& scenario, double t) {
    return measure_weights(scenario.grid(), scenario.metric(), scenario.potential(), t);
}

SymTensorField ricci_tensor(const GridSpec& grid, const MetricFamily& metric, double t) {
    const int n = grid.dimension();
    SymTensorField ric(n, grid.size());
    if (metric.variant() != MetricVariant::conformal_2d) return ric;
    if (n != 2) throw NotImplementedError("conformal Ricci curvature is implemented for n = 2 only");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Jet a = log_factor_jet(metric, t, grid.node(i), grid.spacing(), n);
        const double lap = a.hess.xx + a.hess.yy;
        ric[i] = Sym2{-lap, 0.0, -lap};
    }
    return ric;
}

SymTensorField potential_hessian(const FlowScenario& s, double t) {
    const GridSpec& grid = s.grid();
    const int n = grid.dimension();
    SymTensorField out(n, grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point x = grid.node(i);
        out[i] = conformal_hessian(potential_jet(s, t, x),
                                   log_factor_jet(s.metric(), t, x, grid.spacing(), n), n);
    }
    return out;
}

SymTensorField bakry_emery_ricci(const FlowScenario& s, double t, ModelDimension m) {
    check_dimension(s, m);
    const GridSpec& grid = s.grid();
    const int n = grid.dimension();
    SymTensorField out = ricci_tensor(grid, s.metric(), t);
    const bool constant_phi = s.potential_constant_in_space();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (constant_phi) continue;
        const Point x = grid.node(i);
        const Jet phi = potential_jet(s, t, x);
        const Sym2 hess =
            conformal_hessian(phi, log_factor_jet(s.metric(), t, x, grid.spacing(), n), n);
        Sym2& r = out[i];
        r.xx += hess.xx;
        r.xy += hess.xy;
        r.yy += hess.yy;
        if (!m.is_infinite()) {
            const double inv = 1.0 / (m.value() - n);
            r.xx -= phi.grad[0] * phi.grad[0] * inv;
            r.xy -= phi.grad[0] * phi.grad[1] * inv;
            r.yy -= phi.grad[1] * phi.grad[1] * inv;
        }
    }
    return out;
}

SymTensorField super_flow_tensor(const FlowScenario& s, double t, ModelDimension m) {
    SymTensorField out = bakry_emery_ricci(s, t, m);
    if (!s.time_dependent()) return out;
    const GridSpec& grid = s.grid();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point x = grid.node(i);
        // (1/2) d/dt exp(2a) = exp(2a) da/dt
        const double half_rate = s.factor(t, x) * s.metric().log_factor_rate(t, x);
        out[i].xx += half_rate;
        out[i].yy += half_rate;
    }
    return out;
}

Field super_flow_residual(const FlowScenario& s, double t, ModelDimension m, double K) {
    const SymTensorField tensor = super_flow_tensor(s, t, m);
    const GridSpec& grid = s.grid();
    Field out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Sym2 r = tensor[i];
        const double kg = K * s.factor(t, grid.node(i));
        r.xx -= kg;
        r.yy -= kg;
        out[i] = min_eigenvalue(r, grid.dimension());
    }
    return out;
}

double compatibility_residual(const FlowScenario& s, double t) {
    const GridSpec& grid = s.grid();
    const int n = grid.dimension();
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point x = grid.node(i);
        // (1/2) tr_g(dg/dt) = n da/dt
        const double r = s.phi_rate(t, x) - n * s.metric().log_factor_rate(t, x);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

double curvature_lower_bound(const FlowScenario& s, std::span<const double> times,
                             ModelDimension m) {
    double best = std::numeric_limits<double>::infinity();
    const GridSpec& grid = s.grid();
    for (double t : times) {
        const SymTensorField tensor = super_flow_tensor(s, t, m);
        for (std::size_t i = 0; i < grid.size(); ++i)
            best = std::min(best, min_eigenvalue(tensor[i], grid.dimension()) /
                                      s.factor(t, grid.node(i)));
    }
    return best;
}

} // namespace wlab
