#include "wittenlab/entropy.hpp"
#include "wittenlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wlab {

Field time_derivative(std::span<const double> v, double step, int order) {
    const std::size_t n = v.size();
    if (n < 5) throw PreconditionError("time differences need at least five samples");
    if (order != 1 && order != 2) throw PreconditionError("derivative order must be 1 or 2");
    Field out(n);
    if (order == 1) {
        const double s = 12.0 * step;
        for (std::size_t i = 2; i + 2 < n; ++i)
            out[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / s;
        out[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / s;
        out[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / s;
        const std::size_t e = n - 1;
        out[e] = (25.0 * v[e] - 48.0 * v[e - 1] + 36.0 * v[e - 2] - 16.0 * v[e - 3] + 3.0 * v[e - 4]) / s;
        out[e - 1] = (3.0 * v[e] + 10.0 * v[e - 1] - 18.0 * v[e - 2] + 6.0 * v[e - 3] - v[e - 4]) / s;
    } else {
        const double s = 12.0 * step * step;
        for (std::size_t i = 2; i + 2 < n; ++i)
            out[i] = (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) / s;
        out[0] = (35.0 * v[0] - 104.0 * v[1] + 114.0 * v[2] - 56.0 * v[3] + 11.0 * v[4]) / s;
        out[1] = (11.0 * v[0] - 20.0 * v[1] + 6.0 * v[2] + 4.0 * v[3] - v[4]) / s;
        const std::size_t e = n - 1;
        out[e] = (35.0 * v[e] - 104.0 * v[e - 1] + 114.0 * v[e - 2] - 56.0 * v[e - 3] + 11.0 * v[e - 4]) / s;
        out[e - 1] = (11.0 * v[e] - 20.0 * v[e - 1] + 6.0 * v[e - 2] + 4.0 * v[e - 3] - v[e - 4]) / s;
    }
    return out;
}

bool is_uniform(std::span<const double> t) {
    if (t.size() < 2) return true;
    const double step = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    for (std::size_t k = 1; k < t.size(); ++k)
        if (std::abs((t[k] - t[k - 1]) - step) > 1e-9 * std::abs(step)) return false;
    return true;
}

double entropy_rel(std::span<const double> f, const WeightedMeasure& mu) {
    if (f.size() != mu.size()) throw PreconditionError("field size does not match the measure");
    Field flogf(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) flogf[i] = f[i] * std::log(f[i]);
    return kernels::weighted_sum(mu.weights, flogf);
}

namespace {

Field log_of(std::span<const double> f) {
    Field out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(f[i] > 0.0)) throw PositivityError("field must be positive to take its logarithm");
        out[i] = std::log(f[i]);
    }
    return out;
}

std::vector<double> positive_samples(const FlowScenario& s) {
    std::vector<double> t;
    for (double x : s.times())
        if (x > 0.0) t.push_back(x);
    if (t.size() < 5) throw PreconditionError("entropy curves need at least five samples with t > 0");
    if (!is_uniform(t)) throw PreconditionError("entropy curves need a uniform time grid");
    return t;
}

// P_{0,t} f at each sample time.
std::vector<Field> evolve_to_samples(const FlowScenario& s, const HeatPropagator& P,
                                     const std::vector<double>& samples) {
    std::vector<double> path;
    path.push_back(0.0);
    path.insert(path.end(), samples.begin(), samples.end());
    auto traj = P.trajectory(s.initial(), path);
    traj.erase(traj.begin());
    return traj;
}

std::vector<bool> one_sided_flags(std::size_t n) {
    std::vector<bool> flags(n, false);
    for (std::size_t k = 0; k < n; ++k) flags[k] = k < 2 || k + 2 >= n;
    return flags;
}

} // namespace

double fisher(std::span<const double> f, const WittenOperator& L) {
    return L.dirichlet(f, log_of(f));
}

double fisher(std::span<const double> f, const FlowScenario& scenario, double t) {
    return fisher(f, WittenOperator(scenario, t));
}

double fisher_pointwise(std::span<const double> f, const FlowScenario& scenario, double t) {
    const Field g = gradient_sq(f, scenario, t);
    const auto mu = measure_weights(scenario, t);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += mu.weights[i] * g[i] / f[i];
    return acc;
}

double hessian_integral(std::span<const double> u, const FlowScenario& scenario, double t) {
    const GridSpec& grid = scenario.grid();
    const SymTensorField H = hessian(log_of(u), scenario, t);
    const auto mu = measure_weights(scenario, t);
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        acc += mu.weights[i] * u[i] *
               tensor_norm_sq(H[i], scenario.factor(t, grid.node(i)), grid.dimension());
    return acc;
}

double curvature_integral(std::span<const double> u, const FlowScenario& scenario, double t,
                          double K) {
    const GridSpec& grid = scenario.grid();
    const SymTensorField T = super_flow_tensor(scenario, t, ModelDimension::infinite());
    const auto d = partials(log_of(u), grid);
    const auto mu = measure_weights(scenario, t);
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double g = scenario.factor(t, grid.node(i));
        Sym2 r = T[i];
        r.xx -= K * g;
        r.yy -= K * g;
        acc += mu.weights[i] * u[i] * tensor_contract(r, d[0][i], d[1][i], g, grid.dimension());
    }
    return acc;
}

double rhs_w_dissipation(std::span<const double> u, const FlowScenario& scenario, double t) {
    const EntropyCoefficients c(scenario.K());
    return -c.dissipation_weight(t) *
           (hessian_integral(u, scenario, t) + curvature_integral(u, scenario, t, scenario.K()));
}

std::size_t EntropyCurve::index_of(double time) const {
    for (std::size_t k = 0; k < t.size(); ++k)
        if (std::abs(t[k] - time) <= 1e-12 * std::max(1.0, std::abs(time))) return k;
    throw PreconditionError("t = " + std::to_string(time) + " is not a sample of the entropy curve");
}

EntropyCurve h_entropy_curve(const FlowScenario& scenario, const HeatPropagator& propagator) {
    const std::vector<double> samples = positive_samples(scenario);
    const std::size_t n = samples.size();
    const double step = (samples.back() - samples.front()) / static_cast<double>(n - 1);
    const double K = scenario.K();
    const EntropyCoefficients c(K);

    EntropyCurve curve;
    curve.K = K;
    curve.t = samples;
    curve.initial_entropy = entropy_rel(scenario.initial(), measure_weights(scenario, 0.0));
    for (Field* f : {&curve.entropy, &curve.H, &curve.dH_identity, &curve.rhs, &curve.fisher,
                     &curve.hessian_integral, &curve.curvature_integral, &curve.W,
                     &curve.dW_identity, &curve.second_order_lhs, &curve.second_order_identity})
        f->assign(n, 0.0);

    const auto fields = evolve_to_samples(scenario, propagator, samples);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = samples[k];
        const Field& u = fields[k];
        const WittenOperator L(scenario, t);
        curve.entropy[k] = entropy_rel(u, L.measure());
        curve.fisher[k] = fisher(u, L);
        curve.hessian_integral[k] = hessian_integral(u, scenario, t);
        curve.curvature_integral[k] = curvature_integral(u, scenario, t, K);
        const double gap = curve.initial_entropy - curve.entropy[k];
        curve.H[k] = c.D(t) * gap;
        curve.dH_identity[k] = c.D(t) * (curve.fisher[k] - c.C(t) * gap);
        curve.rhs[k] = -c.dissipation_weight(t) *
                       (curve.hessian_integral[k] + curve.curvature_integral[k]);
    }
    curve.dH = time_derivative(curve.H, step, 1);
    curve.d2H = time_derivative(curve.H, step, 2);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = samples[k];
        const double damped = curve.d2H[k] + c.two_k_coth(t) * curve.dH[k];
        curve.W[k] = curve.H[k] + c.beta(t) * curve.dH[k];
        curve.dW_identity[k] = c.beta(t) * damped;
        curve.second_order_lhs[k] = damped + 2.0 * c.D(t) * curve.hessian_integral[k];
        curve.second_order_identity[k] = -2.0 * c.D(t) * curve.curvature_integral[k];
    }
    curve.dW = time_derivative(curve.W, step, 1);
    curve.one_sided = one_sided_flags(n);
    return curve;
}

EntropyCurve h_entropy_curve(const FlowScenario& scenario) {
    const HeatPropagator P(scenario);
    return h_entropy_curve(scenario, P);
}

EntropyCurve w_entropy_curve(const FlowScenario& scenario) { return h_entropy_curve(scenario); }

namespace {

std::size_t interior_index(const EntropyCurve& curve, double t) {
    const std::size_t k = curve.index_of(t);
    if (curve.one_sided[k])
        throw PreconditionError("t = " + std::to_string(t) +
                                " is too near the ends of the time grid for central differences");
    return k;
}

} // namespace

SecondOrderValue second_order_lhs(const EntropyCurve& curve, double t) {
    const std::size_t k = interior_index(curve, t);
    return {curve.second_order_lhs[k], curve.second_order_identity[k]};
}

SecondOrderValue second_order_lhs(const FlowScenario& scenario, double t) {
    return second_order_lhs(h_entropy_curve(scenario), t);
}

double km_second_order_lhs(const EntropyCurve& curve, double t, ModelDimension m, int dimension) {
    if (m.is_infinite()) throw PreconditionError("the (K, m) expression needs a finite m");
    if (!(m.value() > dimension))
        throw InvalidDimensionError("the (K, m) expression needs m > n, got m = " + m.str());
    const std::size_t k = interior_index(curve, t);
    const EntropyCoefficients c(curve.K);
    const double fi = curve.fisher[k];
    return curve.d2H[k] + c.two_k_coth(t) * curve.dH[k] + 2.0 * c.D(t) / m.value() * fi * fi;
}

double km_second_order_lhs(const FlowScenario& scenario, double t, ModelDimension m) {
    if (m.is_infinite()) throw PreconditionError("the (K, m) expression needs a finite m");
    if (!(m.value() > scenario.dimension()))
        throw InvalidDimensionError("the (K, m) expression needs m > n, got m = " + m.str());
    return km_second_order_lhs(h_entropy_curve(scenario), t, m, scenario.dimension());
}

double hmk_subtractor(double m, double K, double t) {
    return 0.5 * m * (1.0 + std::log(4.0 * std::numbers::pi * t) + K * t + K * K * t * t / 6.0);
}

HmkCurve hmk_wmk_curve(const FlowScenario& scenario, ModelDimension m) {
    if (m.is_infinite()) throw PreconditionError("H_{m,K} needs a finite m");
    if (m.value() < scenario.dimension())
        throw InvalidDimensionError("m = " + m.str() + " is below the manifold dimension");
    const auto mu0 = measure_weights(scenario, 0.0);
    const double mass = kernels::weighted_sum(mu0.weights, scenario.initial());
    if (std::abs(mass - 1.0) > 1e-10)
        throw PreconditionError("fundamental-solution surrogate must have unit mass, got " +
                                std::to_string(mass));

    const std::vector<double> samples = positive_samples(scenario);
    const std::size_t n = samples.size();
    const double step = (samples.back() - samples.front()) / static_cast<double>(n - 1);
    const HeatPropagator P(scenario);
    const auto fields = evolve_to_samples(scenario, P, samples);

    HmkCurve curve;
    curve.K = scenario.K();
    curve.m = m.value();
    curve.t = samples;
    curve.entropy.resize(n);
    curve.H.resize(n);
    curve.W.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        curve.entropy[k] = entropy_rel(fields[k], measure_weights(scenario, samples[k]));
        curve.H[k] = -curve.entropy[k] - hmk_subtractor(curve.m, curve.K, samples[k]);
    }
    curve.dH = time_derivative(curve.H, step, 1);
    for (std::size_t k = 0; k < n; ++k) curve.W[k] = curve.H[k] + samples[k] * curve.dH[k];
    curve.dW = time_derivative(curve.W, step, 1);
    curve.one_sided = one_sided_flags(n);
    return curve;
}

} // namespace wlab
