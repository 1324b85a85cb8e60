#include "wittenlab/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace wlab {

// ---------------------------------------------------------------------------
// MetricFamily

MetricFamily MetricFamily::euclidean() { return MetricFamily{}; }

MetricFamily MetricFamily::exponential_scaling(double lambda, double c0) {
    if (!(c0 > 0.0)) throw DegenerateMetricError("scaling metric needs c0 > 0");
    MetricFamily m;
    m.variant_ = MetricVariant::isotropic_scaling;
    m.law_ = ScalingLaw::exponential;
    m.p0_ = lambda;
    m.c0_ = c0;
    return m;
}

MetricFamily MetricFamily::linear_scaling(double c0, double rate) {
    MetricFamily m;
    m.variant_ = MetricVariant::isotropic_scaling;
    m.law_ = ScalingLaw::linear;
    m.c0_ = c0;
    m.p1_ = rate;
    return m;
}

MetricFamily MetricFamily::conformal(double amplitude, int frequency, double decay, double phase) {
    MetricFamily m;
    m.variant_ = MetricVariant::conformal_2d;
    m.p0_ = amplitude;
    m.p1_ = decay;
    m.frequency_ = frequency;
    m.phase_ = phase;
    return m;
}

bool MetricFamily::time_dependent() const noexcept {
    switch (variant_) {
    case MetricVariant::static_euclidean: return false;
    case MetricVariant::isotropic_scaling:
        return law_ == ScalingLaw::exponential ? p0_ != 0.0 : p1_ != 0.0;
    case MetricVariant::conformal_2d: return p1_ != 0.0 && p0_ != 0.0;
    }
    return false;
}

double MetricFamily::scale(double t) const {
    if (variant_ != MetricVariant::isotropic_scaling) return 1.0;
    const double c = law_ == ScalingLaw::exponential ? c0_ * std::exp(2.0 * p0_ * t) : c0_ + p1_ * t;
    if (!(c > 0.0))
        throw DegenerateMetricError("scaling metric c(t) = " + std::to_string(c) +
                                    " is not positive at t = " + std::to_string(t));
    return c;
}

double MetricFamily::scale_rate(double t) const {
    if (variant_ != MetricVariant::isotropic_scaling) return 0.0;
    return law_ == ScalingLaw::exponential ? 2.0 * p0_ * scale(t) : p1_;
}

double MetricFamily::log_factor(double t, Point x) const {
    switch (variant_) {
    case MetricVariant::static_euclidean: return 0.0;
    case MetricVariant::isotropic_scaling: return 0.5 * std::log(scale(t));
    case MetricVariant::conformal_2d:
        return p0_ * std::exp(-p1_ * t) * std::cos(frequency_ * x[0] - phase_);
    }
    return 0.0;
}

double MetricFamily::log_factor_rate(double t, Point x) const {
    switch (variant_) {
    case MetricVariant::static_euclidean: return 0.0;
    case MetricVariant::isotropic_scaling: return 0.5 * scale_rate(t) / scale(t);
    case MetricVariant::conformal_2d: return -p1_ * log_factor(t, x);
    }
    return 0.0;
}

double MetricFamily::factor(double t, Point x) const {
    if (variant_ == MetricVariant::isotropic_scaling) return scale(t);
    return std::exp(2.0 * log_factor(t, x));
}

// ---------------------------------------------------------------------------
// PotentialFamily

PotentialFamily PotentialFamily::zero(CompatibilityMode mode) {
    PotentialFamily p;
    p.mode_ = mode;
    return p;
}

PotentialFamily PotentialFamily::quadratic(double kappa, CompatibilityMode mode) {
    PotentialFamily p;
    p.kind_ = PotentialKind::quadratic;
    p.kappa_ = kappa;
    p.mode_ = mode;
    return p;
}

PotentialFamily PotentialFamily::trig(std::vector<TrigTerm> terms, CompatibilityMode mode) {
    PotentialFamily p;
    p.kind_ = PotentialKind::trig;
    p.terms_ = std::move(terms);
    p.mode_ = mode;
    return p;
}

double PotentialFamily::base(Point x, int dimension) const noexcept {
    switch (kind_) {
    case PotentialKind::zero: return 0.0;
    case PotentialKind::quadratic: {
        const double r2 = dimension == 1 ? x[0] * x[0] : x[0] * x[0] + x[1] * x[1];
        return 0.5 * kappa_ * r2;
    }
    case PotentialKind::trig: {
        double acc = 0.0;
        for (const auto& term : terms_) {
            const double arg = term.k1 * x[0] + (dimension == 2 ? term.k2 * x[1] : 0.0);
            acc += term.coefficient * std::cos(arg);
        }
        return acc;
    }
    }
    return 0.0;
}

bool PotentialFamily::base_is_constant() const noexcept {
    switch (kind_) {
    case PotentialKind::zero: return true;
    case PotentialKind::quadratic: return kappa_ == 0.0;
    case PotentialKind::trig:
        return std::all_of(terms_.begin(), terms_.end(), [](const TrigTerm& t) {
            return t.coefficient == 0.0 || (t.k1 == 0 && t.k2 == 0);
        });
    }
    return true;
}

double potential_value(const MetricFamily& metric, const PotentialFamily& potential, int dimension,
                       double t, Point x) {
    double phi = potential.base(x, dimension);
    if (potential.mode() == CompatibilityMode::fixed_measure)
        phi += dimension * metric.log_factor(t, x);
    return phi;
}

double potential_rate(const MetricFamily& metric, const PotentialFamily& potential, int dimension,
                      double t, Point x) {
    if (potential.mode() != CompatibilityMode::fixed_measure) return 0.0;
    return dimension * metric.log_factor_rate(t, x);
}

// ---------------------------------------------------------------------------
// FlowScenario

FlowScenario::FlowScenario(GridSpec grid, MetricFamily metric, PotentialFamily potential, double K,
                           ModelDimension m, std::vector<double> times, Field initial)
    : grid_(std::move(grid)), metric_(std::move(metric)), potential_(std::move(potential)), K_(K),
      m_(m), times_(std::move(times)), initial_(std::move(initial)) {
    if (metric_.variant() == MetricVariant::conformal_2d && grid_.dimension() != 2)
        throw PreconditionError("conformal-2d metric requires dimension 2");
    if (potential_.kind() == PotentialKind::quadratic && grid_.periodic() &&
        potential_.kappa() != 0.0)
        throw PreconditionError("quadratic potential is not periodic; use a box domain");
    if (!std::isfinite(K_)) throw PreconditionError("K must be finite");
    if (times_.size() < 5) throw PreconditionError("time grid needs at least 5 points");
    if (times_.front() < 0.0) throw PreconditionError("time grid must start at t >= 0");
    for (std::size_t k = 1; k < times_.size(); ++k)
        if (!(times_[k] > times_[k - 1]))
            throw PreconditionError("time grid must be strictly increasing");
    if (initial_.size() != grid_.size())
        throw PreconditionError("initial datum size does not match the grid");
    for (double v : initial_)
        if (!(v > 0.0) || !std::isfinite(v))
            throw PreconditionError("initial datum must be positive and finite everywhere");
    for (double t : times_) (void)metric_.scale(t); // degenerate-metric check over the window
}

double FlowScenario::phi(double t, Point x) const {
    return potential_value(metric_, potential_, grid_.dimension(), t, x);
}

double FlowScenario::phi_rate(double t, Point x) const {
    return potential_rate(metric_, potential_, grid_.dimension(), t, x);
}

bool FlowScenario::time_dependent() const noexcept { return metric_.time_dependent(); }

bool FlowScenario::potential_constant_in_space() const noexcept {
    if (!potential_.base_is_constant()) return false;
    if (potential_.mode() == CompatibilityMode::fixed_measure &&
        metric_.variant() == MetricVariant::conformal_2d && metric_.amplitude() != 0.0)
        return false;
    return true;
}

FlowScenario FlowScenario::with_initial(Field initial) const {
    return FlowScenario(grid_, metric_, potential_, K_, m_, times_, std::move(initial));
}

FlowScenario FlowScenario::with_K(double K) const {
    return FlowScenario(grid_, metric_, potential_, K, m_, times_, initial_);
}

FlowScenario FlowScenario::with_times(std::vector<double> times) const {
    return FlowScenario(grid_, metric_, potential_, K_, m_, std::move(times), initial_);
}

FlowScenario FlowScenario::with_grid(GridSpec grid, Field initial) const {
    return FlowScenario(std::move(grid), metric_, potential_, K_, m_, times_, std::move(initial));
}

} // namespace wlab
