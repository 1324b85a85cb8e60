#pragma once

#include "wittenlab/geometry.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace wlab {

/// Discrete Witten Laplacian L = Delta_g - grad_g phi . grad_g at a fixed time,
/// assembled in divergence form:
///
///   (L u)_i = 1/rho_i * sum_{links i~j} w_ij (u_j - u_i) / h^2
///
/// with rho = e^{-phi} sqrt(det g) at the node and w = e^{-phi} g^{11}
/// sqrt(det g) at the link midpoint. Multiplying by the quadrature weights
/// mu_i = rho_i h^n gives a symmetric matrix, so mu-self-adjointness, zero row
/// sums and the discrete integration-by-parts identity are exact by
/// construction. Box walls carry no links (zero flux).
class WittenOperator {
public:
    WittenOperator(const FlowScenario& scenario, double t);

    const GridSpec& grid() const noexcept { return grid_; }
    double time() const noexcept { return time_; }
    const WeightedMeasure& measure() const noexcept { return measure_; }
    std::size_t size() const noexcept { return measure_.size(); }

    void apply(std::span<const double> u, std::span<double> out) const;
    Field apply(std::span<const double> u) const;

    /// sum_i mu_i u_i v_i
    double inner(std::span<const double> u, std::span<const double> v) const;
    /// Link form sum_{i~j} kappa_ij (u_j - u_i)(v_j - v_i), the discrete
    /// int <grad u, grad v> dmu; equals -<Lu, v>_mu exactly.
    double dirichlet(std::span<const double> u, std::span<const double> v) const;
    /// (1/2) L(u^2) - u L u, the operator's own carre du champ.
    Field carre_du_champ(std::span<const double> u) const;

    /// Symmetric matrix diag(mu) L.
    Eigen::SparseMatrix<double> stiffness() const;
    /// diag(mu) - theta_dt * diag(mu) L, the SPD matrix of an implicit step.
    Eigen::SparseMatrix<double> implicit_matrix(double theta_dt) const;

private:
    GridSpec grid_;
    double time_;
    WeightedMeasure measure_;
    // Link conductances kappa = w h^{n-2}; link_[axis][i] joins i and i + e_axis.
    std::array<Field, 2> link_;
    Field east_, west_, north_, south_;
};

/// Time-inhomogeneous heat semigroup P_{s,t} of d_t u = L_t u.
///
/// Crank-Nicolson with the operator refreshed at each step midpoint. The first
/// two steps of a run are each taken as 16 implicit Euler sub-steps to damp
/// the stiff modes of rough data without a large start-up error. A step that leaves a monitored field
/// non-positive is redone as implicit Euler sub-steps; if that still fails a
/// PositivityError is raised.
class HeatPropagator {
public:
    /// `max_step <= 0` selects min(h, smallest time-grid spacing) / 4.
    explicit HeatPropagator(FlowScenario scenario, double max_step = 0.0);
    ~HeatPropagator();
    HeatPropagator(const HeatPropagator&) = delete;
    HeatPropagator& operator=(const HeatPropagator&) = delete;

    const FlowScenario& scenario() const noexcept { return scenario_; }
    double max_step() const noexcept { return max_step_; }
    std::size_t step_count(double s, double t) const;

    /// P_{s,t} f for a positive datum.
    Field evolve(std::span<const double> f, double s, double t) const;

    /// P_{s,t} applied to every field with one shared step sequence. Fields
    /// that are positive on entry are monitored for positivity; other fields
    /// (signed test functions, f log f, ...) ride along linearly.
    std::vector<Field> evolve_batch(std::vector<Field> fields, double s, double t) const;

    /// Evolves along `times` (which must start at s0) and returns P_{s0, t_k} f for each k.
    std::vector<Field> trajectory(std::span<const double> f, std::span<const double> times) const;

    /// Number of Crank-Nicolson steps that needed the implicit Euler fallback.
    std::size_t fallback_count() const noexcept { return fallbacks_.load(); }

private:
    struct StepSolver;
    std::shared_ptr<const StepSolver> solver(double t_eval, double dt, double theta) const;
    bool implicit_step(std::vector<Field>& fields, const std::vector<bool>& monitored, double t0,
                       double dt, double theta) const;
    void step(std::vector<Field>& fields, const std::vector<bool>& monitored, double t0, double dt,
              bool smoothing) const;
    void advance(std::vector<Field>& fields, const std::vector<bool>& monitored, double s, double t,
                 int& smoothing_left) const;

    FlowScenario scenario_;
    double max_step_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::pair<double, double>, std::shared_ptr<const StepSolver>> static_cache_;
    mutable std::atomic<std::size_t> fallbacks_{0};
};

// ---------------------------------------------------------------------------
// Pointwise differential operators. Central differences; one-sided
// second-order stencils on box walls.

/// Flat partial derivatives d_x u, d_y u.
std::array<Field, 2> partials(std::span<const double> u, const GridSpec& grid);

/// |grad u|_g^2 = |d u|^2 exp(-2a).
Field gradient_sq(std::span<const double> u, const GridSpec& grid, const MetricFamily& metric,
                  double t);
Field gradient_sq(std::span<const double> u, const FlowScenario& scenario, double t);

/// <grad u, grad v>_g at every node.
Field gradient_dot(std::span<const double> u, std::span<const double> v, const GridSpec& grid,
                   const MetricFamily& metric, double t);

/// Covariant Hessian (coordinate components) with the conformal Christoffel
/// correction; raw second differences on flat metrics.
SymTensorField hessian(std::span<const double> u, const GridSpec& grid, const MetricFamily& metric,
                       double t);
SymTensorField hessian(std::span<const double> u, const FlowScenario& scenario, double t);

/// |T|_g^2 for a covariant 2-tensor on an isotropic metric with factor `g`.
double tensor_norm_sq(const Sym2& T, double g, int dimension) noexcept;
/// T(grad u, grad u) with grad u = g^{-1} du.
double tensor_contract(const Sym2& T, double ux, double uy, double g, int dimension) noexcept;

/// Gamma_2 in semigroup form, (1/2) L|grad u|^2 - <grad u, grad L u>.
Field gamma2(std::span<const double> u, const FlowScenario& scenario, double t);
/// Gamma_2 in Bochner form, |Hess u|^2 + Ric(L)(grad u, grad u).
Field gamma2_direct(std::span<const double> u, const FlowScenario& scenario, double t);
/// max |gamma2 - gamma2_direct| over nodes at least two layers away from any
/// box wall (every node on the torus).
double bochner_residual(std::span<const double> u, const FlowScenario& scenario, double t);

} // namespace wlab
