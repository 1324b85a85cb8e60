#include "wittenlab/entropy.hpp"
#include "wittenlab/inequalities.hpp"

#include <algorithm>
#include <cmath>

namespace wlab {

HarnackReport harnack_check(const FlowScenario& scenario, const HeatPropagator& propagator,
                            const std::vector<Field>& initial_data, const Tolerance& tolerance) {
    if (scenario.K() > 0.0)
        throw PreconditionError("Harnack checks need a (-K, inf) super flow with K >= 0 "
                                "(scenario K must be <= 0)");
    const double K = -scenario.K();
    const EntropyCoefficients coeff(K);
    const GridSpec& grid = scenario.grid();

    std::vector<double> path{0.0};
    for (double t : scenario.times())
        if (t > 0.0) path.push_back(t);
    if (path.size() < 2) throw PreconditionError("Harnack checks need sample times t > 0");

    HarnackReport out;
    out.K = K;
    std::vector<double> sharp, hamilton;
    for (const Field& u0 : initial_data) {
        for (double v : u0)
            if (!(v > 0.0) || !std::isfinite(v))
                throw PreconditionError("Harnack initial data must be positive and bounded");
        const auto traj = propagator.trajectory(u0, path);
        double A = 0.0;
        for (const auto& u : traj) A = std::max(A, *std::max_element(u.begin(), u.end()));

        double worst_sharp = std::numeric_limits<double>::infinity();
        double worst_ham = worst_sharp;
        for (std::size_t k = 1; k < path.size(); ++k) {
            const double t = path[k];
            const Field& u = traj[k];
            const Field g = gradient_sq(u, scenario, t);
            const double c_sharp = coeff.D(t);
            const double c_ham = 1.0 / t + 2.0 * K;
            for (std::size_t i = 0; i < u.size(); ++i) {
                if (grid.wall_distance(i) < 2) continue;
                const double ratio = g[i] / (u[i] * u[i]);
                const double gap = std::log(A / u[i]);
                const double ms = c_sharp * gap - ratio;
                const double mh = c_ham * gap - ratio;
                if (mh < ms) out.dominance = false;
                worst_sharp = std::min(worst_sharp, ms);
                worst_ham = std::min(worst_ham, mh);
            }
        }
        sharp.push_back(worst_sharp);
        hamilton.push_back(worst_ham);
    }
    const double threshold = tolerance.threshold(grid);
    out.sharp = make_report("harnack-sharp", std::move(sharp), threshold);
    out.hamilton = make_report("harnack-hamilton", std::move(hamilton), threshold);
    return out;
}

HarnackReport harnack_check(const FlowScenario& scenario, const std::vector<Field>& initial_data,
                            const Tolerance& tolerance) {
    const HeatPropagator P(scenario);
    return harnack_check(scenario, P, initial_data, tolerance);
}

} // namespace wlab
