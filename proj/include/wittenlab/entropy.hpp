#pragma once

#include "wittenlab/geometry.hpp"
#include "wittenlab/operators.hpp"

#include <span>
#include <vector>

namespace wlab {

enum class CoefficientBranch { automatic, closed_form, series };

/// Time weights of the H_K / W_K entropies:
///
///   C_K(t) = 2K / (e^{2Kt} - 1)      D_K(t) = 2K / (1 - e^{-2Kt}) = C_K + 2K
///   beta_K(t) = sinh(2Kt) / (2K)     alpha_K(t) = K tanh(Kt)
///
/// `automatic` switches to three-term Taylor series when |K t| < 1e-4, which
/// also covers K = 0 (C = D = 1/t, beta = t, 2K coth(Kt) = 2/t).
class EntropyCoefficients {
public:
    static constexpr double series_threshold = 1e-4;

    explicit EntropyCoefficients(double K, CoefficientBranch branch = CoefficientBranch::automatic);

    double K() const noexcept { return K_; }
    bool uses_series(double t) const noexcept;

    double C(double t) const;
    double D(double t) const;
    double beta(double t) const;
    double alpha(double t) const;
    /// 2K coth(Kt), the damping coefficient of the second-order entropy identity.
    double two_k_coth(double t) const;
    /// 1 + e^{2Kt} = 2 beta D.
    double dissipation_weight(double t) const;

private:
    double K_;
    CoefficientBranch branch_;
};

/// Fourth-order finite difference of uniformly sampled values: central
/// five-point stencils inside, one-sided five-point stencils in the first and
/// last two samples. `order` is 1 or 2.
Field time_derivative(std::span<const double> values, double step, int order);

/// True when `t` is uniform to 1e-9 relative.
bool is_uniform(std::span<const double> t);

/// sum_i mu_i f_i log f_i
double entropy_rel(std::span<const double> f, const WeightedMeasure& mu);

/// Fisher information int |grad f|^2 / f dmu, evaluated as the link form
/// D(f, log f) of the operator at time t. This is the exact entropy
/// dissipation of the discrete flow, and agrees with the pointwise quadrature
/// to O(h^2).
double fisher(std::span<const double> f, const FlowScenario& scenario, double t);
double fisher(std::span<const double> f, const WittenOperator& L);
/// Pointwise quadrature sum_i mu_i |grad f|_g^2 / f_i.
double fisher_pointwise(std::span<const double> f, const FlowScenario& scenario, double t);

/// int |Hess log u|^2 u dmu
double hessian_integral(std::span<const double> u, const FlowScenario& scenario, double t);
/// int ((1/2) dg/dt + Ric(L) - K g)(grad log u, grad log u) u dmu
double curvature_integral(std::span<const double> u, const FlowScenario& scenario, double t,
                          double K);

struct EntropyCurve {
    double K = 0.0;
    std::vector<double> t;
    Field entropy;           // Ent(P_{0,t} f)
    Field H;
    Field dH;                // finite differences
    Field dH_identity;       // D_K [fisher + C_K (Ent(P f) - Ent(f))]
    Field d2H;
    Field W;
    Field dW;                // finite differences
    Field dW_identity;       // beta_K (d2H + 2K coth(Kt) dH)
    Field rhs;               // -(1 + e^{2Kt}) int [|Hess log u|^2 + curvature term] u dmu
    Field fisher;
    Field hessian_integral;
    Field curvature_integral;
    Field second_order_lhs;      // d2H + 2K coth dH + 2 D_K hessian_integral
    Field second_order_identity; // -2 D_K curvature_integral
    std::vector<bool> one_sided; // derivative stencil is one-sided at this sample
    double initial_entropy = 0.0;

    std::size_t size() const noexcept { return t.size(); }
    /// Index of the sample at time `t`; throws if there is none.
    std::size_t index_of(double time) const;
};

/// H_K and W_K along P_{0,t} f for f = scenario.initial(), sampled at every
/// scenario time t > 0 (t = 0 is the propagation origin). Requires a uniform
/// time grid and at least five positive samples.
EntropyCurve h_entropy_curve(const FlowScenario& scenario);
EntropyCurve h_entropy_curve(const FlowScenario& scenario, const HeatPropagator& propagator);
/// Same as h_entropy_curve; W_K and dW_K/dt are always filled in.
EntropyCurve w_entropy_curve(const FlowScenario& scenario);

/// rhs of the W_K dissipation formula for a field u = P_{0,t} f at time t.
double rhs_w_dissipation(std::span<const double> u, const FlowScenario& scenario, double t);

struct SecondOrderValue {
    double lhs = 0.0;
    double identity = 0.0;
};

/// Second-order entropy expression at a curve sample away from the ends.
SecondOrderValue second_order_lhs(const EntropyCurve& curve, double t);
SecondOrderValue second_order_lhs(const FlowScenario& scenario, double t);

/// d2H + 2K coth dH + (2 D_K / m) fisher^2 at a curve sample.
double km_second_order_lhs(const EntropyCurve& curve, double t, ModelDimension m, int dimension);
double km_second_order_lhs(const FlowScenario& scenario, double t, ModelDimension m);

struct HmkCurve {
    double K = 0.0;
    double m = 0.0;
    std::vector<double> t;
    Field entropy; // Ent(u(t) | mu)
    Field H;       // -Ent(u) - (m/2)(1 + log 4 pi t + K t + K^2 t^2 / 6)
    Field dH;
    Field W;       // d/dt (t H) = H + t dH
    Field dW;
    std::vector<bool> one_sided;

    std::size_t size() const noexcept { return t.size(); }
};

/// (m/2)(1 + log(4 pi t) + K t + K^2 t^2 / 6)
double hmk_subtractor(double m, double K, double t);

/// H_{m,K} and W_{m,K} along the flow of a fundamental-solution surrogate
/// (scenario.initial(), which must satisfy int u dmu(0) = 1 to 1e-10).
HmkCurve hmk_wmk_curve(const FlowScenario& scenario, ModelDimension m);

} // namespace wlab
