#include "wittenlab/entropy.hpp"
#include "wittenlab/inequalities.hpp"

#include <algorithm>
#include <cmath>

namespace wlab {

std::size_t steepest_node(const Field& f, const FlowScenario& scenario, double t) {
    const Field g = gradient_sq(f, scenario, t);
    std::size_t best = 0;
    double value = -1.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (scenario.grid().wall_distance(i) >= 2 && g[i] > value) {
            value = g[i];
            best = i;
        }
    return best;
}

namespace {

struct Sampling {
    std::vector<double> r;
    double step;
};

Sampling uniform_window(const FlowScenario& scenario, double s, double T, int samples) {
    if (!(s >= 0.0 && s < T && T <= scenario.final_time() + 1e-12))
        throw PreconditionError("interpolation window needs 0 <= s < T <= final time");
    if (samples < 5) throw PreconditionError("interpolation checks need at least five samples");
    return {uniform_times(s, T, samples), (T - s) / (samples - 1)};
}

// A propagator whose step divides the sample spacing, so every P_{r_k, T}
// runs on the same time lattice. The step is fine enough that time-stepping
// error stays below the O(spacing^2) error of the alpha' differences.
double lattice_step(const FlowScenario& scenario, double spacing) {
    const double target = std::min(scenario.grid().spacing(), spacing) / 16.0;
    return spacing / std::ceil(spacing / target - 1e-9);
}

} // namespace

InterpolationResult interpolation_identity_check(const FlowScenario& scenario, double s, double T,
                                                 const Field& f, int samples, std::size_t probe) {
    const Sampling w = uniform_window(scenario, s, T, samples);
    const HeatPropagator P(scenario, lattice_step(scenario, w.step));
    if (probe == static_cast<std::size_t>(-1)) probe = steepest_node(f, scenario, s);
    if (probe >= f.size()) throw PreconditionError("probe node out of range");

    const auto u = P.trajectory(f, w.r);
    const std::size_t n = w.r.size();
    std::vector<double> alpha(n), gamma(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double r = w.r[k];
        const WittenOperator L(scenario, r);
        Field phi(f.size()), dphi(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) {
            phi[i] = u[k][i] * std::log(u[k][i]);
            dphi[i] = 1.0 + std::log(u[k][i]);
        }
        Field G = L.apply(phi);
        const Field lu = L.apply(u[k]);
        for (std::size_t i = 0; i < f.size(); ++i) G[i] -= dphi[i] * lu[i];
        const auto moved = P.evolve_batch({phi, G}, r, T);
        alpha[k] = moved[0][probe];
        gamma[k] = moved[1][probe];
    }

    InterpolationResult res;
    res.probe = probe;
    res.step = w.step;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double d = (alpha[k + 1] - alpha[k - 1]) / (2.0 * w.step);
        res.max_residual = std::max(res.max_residual, std::abs(d + gamma[k]));
    }
    // composite trapezoid with the Simpson correction when the panel count is even
    double integral = 0.0;
    if ((n - 1) % 2 == 0) {
        for (std::size_t k = 0; k < n; ++k) {
            const double wgt = (k == 0 || k + 1 == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
            integral += wgt * gamma[k];
        }
        integral *= w.step / 3.0;
    } else {
        for (std::size_t k = 0; k + 1 < n; ++k) integral += 0.5 * w.step * (gamma[k] + gamma[k + 1]);
    }
    res.integrated_residual = std::abs(alpha.back() - alpha.front() + integral);
    return res;
}

InequalityReport psi_monotonicity_check(const FlowScenario& scenario, double s, double T,
                                        const Field& f, int samples, std::size_t probe,
                                        const Tolerance& tolerance) {
    const Sampling w = uniform_window(scenario, s, T, samples);
    const HeatPropagator P(scenario, lattice_step(scenario, w.step));
    if (probe == static_cast<std::size_t>(-1)) probe = steepest_node(f, scenario, s);
    if (probe >= f.size()) throw PreconditionError("probe node out of range");

    const auto u = P.trajectory(f, w.r);
    std::vector<double> psi(w.r.size());
    for (std::size_t k = 0; k < w.r.size(); ++k) {
        const double r = w.r[k];
        const auto moved = P.evolve_batch({gradient_sq(u[k], scenario, r)}, r, T);
        psi[k] = std::exp(-2.0 * scenario.K() * (T - r)) * moved[0][probe];
    }
    std::vector<double> margins;
    for (std::size_t k = 0; k + 1 < psi.size(); ++k) margins.push_back(psi[k] - psi[k + 1]);
    return make_report("psi-monotonicity", std::move(margins), tolerance.threshold(scenario.grid()));
}

} // namespace wlab
