#include "wittenlab/kernels.hpp"
#include "wittenlab/operators.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

namespace wlab {

struct HeatPropagator::StepSolver {
    StepSolver(const FlowScenario& scenario, double t, double theta_dt)
        : op(scenario, t) {
        ldlt.compute(op.implicit_matrix(theta_dt));
        if (ldlt.info() != Eigen::Success)
            throw PreconditionError("implicit step matrix could not be factorised");
    }

    WittenOperator op;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

namespace {

constexpr int kSmoothingSteps = 2;
constexpr int kSmoothingSubsteps = 16;

double default_step(const FlowScenario& s) {
    double spacing = s.grid().spacing();
    const auto& t = s.times();
    for (std::size_t k = 1; k < t.size(); ++k) spacing = std::min(spacing, t[k] - t[k - 1]);
    return spacing / 4.0;
}

bool all_positive(const Field& f) {
    return std::all_of(f.begin(), f.end(), [](double v) { return v > 0.0; });
}

} // namespace

HeatPropagator::HeatPropagator(FlowScenario scenario, double max_step)
    : scenario_(std::move(scenario)),
      max_step_(max_step > 0.0 ? max_step : default_step(scenario_)) {}

HeatPropagator::~HeatPropagator() = default;

std::size_t HeatPropagator::step_count(double s, double t) const {
    if (t <= s) return 0;
    return static_cast<std::size_t>(std::max(1.0, std::ceil((t - s) / max_step_ - 1e-9)));
}

std::shared_ptr<const HeatPropagator::StepSolver>
HeatPropagator::solver(double t_eval, double dt, double theta) const {
    if (scenario_.time_dependent())
        return std::make_shared<const StepSolver>(scenario_, t_eval, theta * dt);
    const std::pair<double, double> key{dt, theta};
    std::lock_guard lock(cache_mutex_);
    auto it = static_cache_.find(key);
    if (it != static_cache_.end()) return it->second;
    auto made = std::make_shared<const StepSolver>(scenario_, t_eval, theta * dt);
    static_cache_.emplace(key, made);
    return made;
}

// One theta-scheme step (theta = 1/2: Crank-Nicolson, theta = 1: implicit
// Euler) with the operator taken at t0 + theta dt. Returns false without
// touching `fields` if a monitored field loses positivity.
bool HeatPropagator::implicit_step(std::vector<Field>& fields, const std::vector<bool>& monitored,
                                   double t0, double dt, double theta) const {
    const auto solve = solver(t0 + theta * dt, dt, theta);
    const Field& mu = solve->op.measure().weights;
    const std::size_t size = mu.size();
    std::vector<Field> next(fields.size());
    Field lu(size);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(size));
    for (std::size_t f = 0; f < fields.size(); ++f) {
        std::span<double> r(rhs.data(), size);
        if (theta < 1.0) {
            solve->op.apply(fields[f], lu);
            kernels::scaled_axpy(mu, fields[f], (1.0 - theta) * dt, lu, r);
        } else {
            for (std::size_t i = 0; i < size; ++i) r[i] = mu[i] * fields[f][i];
        }
        const Eigen::VectorXd x = solve->ldlt.solve(rhs);
        next[f].assign(x.data(), x.data() + size);
        if (monitored[f] && !all_positive(next[f])) return false;
    }
    fields = std::move(next);
    return true;
}

void HeatPropagator::step(std::vector<Field>& fields, const std::vector<bool>& monitored, double t0,
                          double dt, bool smoothing) const {
    if (!smoothing && implicit_step(fields, monitored, t0, dt, 0.5)) return;
    if (!smoothing) ++fallbacks_;
    const int n = smoothing ? kSmoothingSubsteps : 2;
    const double sub = dt / n;
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) ok = implicit_step(fields, monitored, t0 + j * sub, sub, 1.0);
    if (ok) return;
    throw PositivityError("heat flow lost positivity near t = " + std::to_string(t0) +
                          " even with implicit Euler steps");
}

void HeatPropagator::advance(std::vector<Field>& fields, const std::vector<bool>& monitored,
                             double s, double t, int& smoothing_left) const {
    const std::size_t steps = step_count(s, t);
    if (steps == 0) return;
    const double dt = (t - s) / static_cast<double>(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t0 = k + 1 == steps ? t - dt : s + static_cast<double>(k) * dt;
        step(fields, monitored, t0, dt, smoothing_left > 0);
        if (smoothing_left > 0) --smoothing_left;
    }
}

Field HeatPropagator::evolve(std::span<const double> f, double s, double t) const {
    std::vector<Field> fields{Field(f.begin(), f.end())};
    if (!all_positive(fields[0]))
        throw PreconditionError("evolve needs a positive datum; use evolve_batch for signed fields");
    return std::move(evolve_batch(std::move(fields), s, t)[0]);
}

std::vector<Field> HeatPropagator::evolve_batch(std::vector<Field> fields, double s,
                                                double t) const {
    if (t < s) throw PreconditionError("heat flow runs forward: need s <= t");
    std::vector<bool> monitored(fields.size());
    for (std::size_t f = 0; f < fields.size(); ++f) {
        if (fields[f].size() != scenario_.grid().size())
            throw PreconditionError("field size does not match the grid");
        monitored[f] = all_positive(fields[f]);
    }
    int smoothing = kSmoothingSteps;
    advance(fields, monitored, s, t, smoothing);
    return fields;
}

std::vector<Field> HeatPropagator::trajectory(std::span<const double> f,
                                              std::span<const double> times) const {
    if (times.empty()) return {};
    std::vector<Field> fields{Field(f.begin(), f.end())};
    if (fields[0].size() != scenario_.grid().size())
        throw PreconditionError("field size does not match the grid");
    const std::vector<bool> monitored{all_positive(fields[0])};
    std::vector<Field> out;
    out.reserve(times.size());
    out.push_back(fields[0]);
    int smoothing = kSmoothingSteps;
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1])) throw PreconditionError("trajectory times must increase");
        advance(fields, monitored, times[k - 1], times[k], smoothing);
        out.push_back(fields[0]);
    }
    return out;
}

} // namespace wlab
