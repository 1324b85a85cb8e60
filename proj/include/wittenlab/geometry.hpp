#pragma once

// Discretised weighted manifolds with time-dependent metric and potential.
//
// Every supported metric is isotropic, g(t,x) = exp(2 a(t,x)) * delta, where
// a is spatially constant for the scaling families. All curvature quantities
// are therefore written in terms of the log-factor a and its flat
// derivatives, which are taken with second-order central stencils on the
// analytic family (never on sampled fields), so the stencils are valid right
// up to box walls.

#include "wittenlab/errors.hpp"

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace wlab {

using Field = std::vector<double>;
using Point = std::array<double, 2>;

enum class DomainKind { periodic_torus, euclidean_box };

/// Uniform tensor-product grid on a 1-D/2-D torus of period 2*pi or on the
/// cell-centred box [-R, R]^n (nodes at -R + (i + 1/2) h).
class GridSpec {
public:
    static GridSpec torus(int dimension, int points_per_axis);
    static GridSpec box(int dimension, int points_per_axis, double half_width);

    DomainKind kind() const noexcept { return kind_; }
    bool periodic() const noexcept { return kind_ == DomainKind::periodic_torus; }
    int dimension() const noexcept { return dimension_; }
    int points_per_axis() const noexcept { return points_; }
    double spacing() const noexcept { return spacing_; }
    /// R for a box; pi for the torus.
    double half_width() const noexcept { return half_width_; }
    /// Period (torus) or 2R (box); equals points_per_axis * spacing.
    double length() const noexcept { return 2.0 * half_width_; }
    std::size_t size() const noexcept;
    double cell_volume() const noexcept;

    double coordinate(int i) const noexcept;
    Point node(std::size_t index) const noexcept;
    std::size_t index(int i, int j = 0) const noexcept;
    int axis_index(std::size_t index, int axis) const noexcept;
    std::size_t nearest_node(Point p) const noexcept;

    /// Number of grid layers between `index` and the nearest box wall
    /// (a large value on the torus).
    int wall_distance(std::size_t index) const noexcept;

    GridSpec refined(int factor = 2) const;

private:
    GridSpec(DomainKind kind, int dimension, int points, double half_width);

    DomainKind kind_;
    int dimension_;
    int points_;
    double half_width_;
    double spacing_;
};

enum class MetricVariant { static_euclidean, isotropic_scaling, conformal_2d };
enum class ScalingLaw { exponential, linear };

/// g(t) = c(t) delta (scaling) or exp(2 a(t,x)) delta (conformal, n = 2).
///
/// Scaling laws: exponential c = c0 exp(2 lambda t), linear c = c0 + rate t.
/// Conformal factor: a = amplitude exp(-decay t) cos(frequency x1 - phase).
class MetricFamily {
public:
    static MetricFamily euclidean();
    static MetricFamily exponential_scaling(double lambda, double c0 = 1.0);
    static MetricFamily linear_scaling(double c0, double rate);
    static MetricFamily conformal(double amplitude, int frequency = 1, double decay = 0.0,
                                  double phase = 0.0);

    MetricVariant variant() const noexcept { return variant_; }
    ScalingLaw law() const noexcept { return law_; }
    bool time_dependent() const noexcept;

    /// c(t); 1 for the static and conformal variants.
    double scale(double t) const;
    double scale_rate(double t) const;

    /// a(t, x) with g = exp(2a) delta. Throws DegenerateMetricError if c(t) <= 0.
    double log_factor(double t, Point x) const;
    double log_factor_rate(double t, Point x) const;
    /// exp(2 a(t, x)).
    double factor(double t, Point x) const;

    double lambda() const noexcept { return p0_; }
    double amplitude() const noexcept { return p0_; }
    int frequency() const noexcept { return frequency_; }
    double decay() const noexcept { return p1_; }

private:
    MetricVariant variant_ = MetricVariant::static_euclidean;
    ScalingLaw law_ = ScalingLaw::exponential;
    double p0_ = 0.0;
    double p1_ = 0.0;
    double c0_ = 1.0;
    double phase_ = 0.0;
    int frequency_ = 1;
};

enum class PotentialKind { zero, quadratic, trig };

/// fixed-measure adds (1/2) log det g(t, x) to the base potential so that
/// e^{-phi} dvol_g does not depend on t; free leaves the base potential alone.
enum class CompatibilityMode { fixed_measure, free };

/// coefficient * cos(k1 x1 + k2 x2)
struct TrigTerm {
    double coefficient = 0.0;
    int k1 = 0;
    int k2 = 0;
};

/// Base potential phi0 from a small catalogue: zero, kappa |x|^2 / 2, or a
/// cosine sum. kappa is signed, so both the L = Delta - K x.grad and the
/// L = Delta + K x.grad conventions are expressible.
class PotentialFamily {
public:
    static PotentialFamily zero(CompatibilityMode mode = CompatibilityMode::fixed_measure);
    static PotentialFamily quadratic(double kappa,
                                     CompatibilityMode mode = CompatibilityMode::fixed_measure);
    static PotentialFamily trig(std::vector<TrigTerm> terms,
                                CompatibilityMode mode = CompatibilityMode::fixed_measure);

    PotentialKind kind() const noexcept { return kind_; }
    CompatibilityMode mode() const noexcept { return mode_; }
    double kappa() const noexcept { return kappa_; }
    const std::vector<TrigTerm>& terms() const noexcept { return terms_; }

    double base(Point x, int dimension) const noexcept;
    bool base_is_constant() const noexcept;

private:
    PotentialKind kind_ = PotentialKind::zero;
    CompatibilityMode mode_ = CompatibilityMode::fixed_measure;
    double kappa_ = 0.0;
    std::vector<TrigTerm> terms_;
};

/// phi(t, x) including the fixed-measure compensator.
double potential_value(const MetricFamily& metric, const PotentialFamily& potential, int dimension,
                       double t, Point x);
/// d phi / dt at (t, x).
double potential_rate(const MetricFamily& metric, const PotentialFamily& potential, int dimension,
                      double t, Point x);

/// Per-node quadrature weights e^{-phi} sqrt(det g) h^n.
struct WeightedMeasure {
    Field weights;

    double total() const noexcept;
    std::size_t size() const noexcept { return weights.size(); }
};

/// Symmetric 2x2 (or 1x1, using xx only) tensor in coordinate components.
struct Sym2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
};

double min_eigenvalue(const Sym2& s, int dimension) noexcept;
double max_eigenvalue(const Sym2& s, int dimension) noexcept;

class SymTensorField {
public:
    SymTensorField() = default;
    SymTensorField(int dimension, std::size_t nodes) : dimension_(dimension), data_(nodes) {}

    int dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return data_.size(); }
    Sym2& operator[](std::size_t i) noexcept { return data_[i]; }
    const Sym2& operator[](std::size_t i) const noexcept { return data_[i]; }

    Field min_eigenvalues() const;
    /// max over nodes of the largest |component|.
    double max_abs() const noexcept;

private:
    int dimension_ = 1;
    std::vector<Sym2> data_;
};

/// m in [n, inf]; infinity is a distinct state, not a large number.
class ModelDimension {
public:
    static ModelDimension infinite() noexcept { return ModelDimension(); }
    static ModelDimension finite(double m) noexcept { return ModelDimension(m); }

    bool is_infinite() const noexcept { return infinite_; }
    /// Throws PreconditionError when infinite.
    double value() const;
    std::string str() const;

private:
    ModelDimension() = default;
    explicit ModelDimension(double m) : infinite_(false), value_(m) {}

    bool infinite_ = true;
    double value_ = std::numeric_limits<double>::infinity();
};

/// A complete experiment: (M, g(t), phi(t), t in [0, T]) with K, m, the
/// sampling times and a positive initial datum.
class FlowScenario {
public:
    FlowScenario(GridSpec grid, MetricFamily metric, PotentialFamily potential, double K,
                 ModelDimension m, std::vector<double> times, Field initial);

    const GridSpec& grid() const noexcept { return grid_; }
    const MetricFamily& metric() const noexcept { return metric_; }
    const PotentialFamily& potential() const noexcept { return potential_; }
    double K() const noexcept { return K_; }
    ModelDimension m() const noexcept { return m_; }
    const std::vector<double>& times() const noexcept { return times_; }
    const Field& initial() const noexcept { return initial_; }
    double final_time() const noexcept { return times_.back(); }
    int dimension() const noexcept { return grid_.dimension(); }

    double phi(double t, Point x) const;
    double phi_rate(double t, Point x) const;
    double log_factor(double t, Point x) const { return metric_.log_factor(t, x); }
    double factor(double t, Point x) const { return metric_.factor(t, x); }

    /// True when either the metric or the potential moves with t.
    bool time_dependent() const noexcept;
    /// phi(t, .) is constant in space for every t.
    bool potential_constant_in_space() const noexcept;

    FlowScenario with_initial(Field initial) const;
    FlowScenario with_K(double K) const;
    FlowScenario with_times(std::vector<double> times) const;
    FlowScenario with_grid(GridSpec grid, Field initial) const;

private:
    GridSpec grid_;
    MetricFamily metric_;
    PotentialFamily potential_;
    double K_;
    ModelDimension m_;
    std::vector<double> times_;
    Field initial_;
};

/// Evenly spaced times start, ..., end.
std::vector<double> uniform_times(double start, double end, int count);

/// Samples `fn(x)` at every node.
template <class Fn>
Field sample(const GridSpec& grid, Fn&& fn) {
    Field out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(grid.node(i));
    return out;
}

// ---------------------------------------------------------------------------
// Operations

/// Per-node conformal factor exp(2a) at time t (c(t) for scaling, 1 if static).
Field metric_at(const MetricFamily& metric, const GridSpec& grid, double t);

WeightedMeasure measure_weights(const GridSpec& grid, const MetricFamily& metric,
                                const PotentialFamily& potential, double t);
WeightedMeasure measure_weights(const FlowScenario& scenario, double t);

/// Ric of g(t); zero for the flat variants, -(Delta_0 a) delta for conformal-2d.
SymTensorField ricci_tensor(const GridSpec& grid, const MetricFamily& metric, double t);

/// Metric-compatible Hessian of phi(t, .) in coordinate components.
SymTensorField potential_hessian(const FlowScenario& scenario, double t);

/// Ric + Hess phi - dphi (x) dphi / (m - n); the last term is dropped for m = inf.
SymTensorField bakry_emery_ricci(const FlowScenario& scenario, double t, ModelDimension m);

/// (1/2) dg/dt + Ric_{m,n}(L), the tensor whose lower bound defines the super flow.
SymTensorField super_flow_tensor(const FlowScenario& scenario, double t, ModelDimension m);

/// Per-node minimum eigenvalue of (1/2) dg/dt + Ric_{m,n}(L) - K g.
Field super_flow_residual(const FlowScenario& scenario, double t, ModelDimension m, double K);

/// max over nodes of |d phi/dt - (1/2) tr_g(dg/dt)|.
double compatibility_residual(const FlowScenario& scenario, double t);

/// Largest K with (1/2) dg/dt + Ric_{m,n}(L) >= K g at every node and every
/// time in `times`.
double curvature_lower_bound(const FlowScenario& scenario, std::span<const double> times,
                             ModelDimension m);

} // namespace wlab
