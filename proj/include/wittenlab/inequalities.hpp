#pragma once

// Semigroup inequalities checked instance-wise on families of test functions.
//
// Every pointwise inequality is summarised by its margin (right side minus
// left side), minimised over nodes. On boxes the minimum skips the two node
// layers next to each wall, where the gradient stencils are one-sided.

#include "wittenlab/geometry.hpp"
#include "wittenlab/operators.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wlab {

enum class FamilyKind { random_trig, gaussian_bumps, near_eigen };

FamilyKind parse_family_kind(const std::string& name);
std::string family_kind_name(FamilyKind kind);

struct TestFamily {
    int count = 50;
    FamilyKind kind = FamilyKind::random_trig;
    double floor = 1e-3;     // every f satisfies floor <= f <= 1/floor
    std::uint64_t seed = 1;
    double epsilon = 1e-2;   // perturbation size of near-eigen functions
};

/// Deterministic test functions for `family` on the scenario grid. near-eigen
/// functions are 1 + eps v with grad v(x0) = e and Hess v(x0) = 0, where x0
/// and e are the node and direction of the most negative eigenvalue of the
/// super-flow residual at time `s`.
std::vector<Field> generate_family(const TestFamily& family, const FlowScenario& scenario,
                                   double s = 0.0);

/// Most negative eigenvalue of (1/2) dg/dt + Ric(L) - K g at time s, with its
/// node and unit eigenvector.
struct ResidualMinimum {
    double value = 0.0;
    std::size_t node = 0;
    std::array<double, 2> direction{1.0, 0.0};
};
ResidualMinimum residual_minimum(const FlowScenario& scenario, double s);

/// Verdict threshold: slack + h2_allowance * h^2.
struct Tolerance {
    double slack = 1e-8;
    double h2_allowance = 0.0;

    double threshold(const GridSpec& grid) const noexcept {
        return slack + h2_allowance * grid.spacing() * grid.spacing();
    }
};

struct InequalityReport {
    std::string id;
    std::vector<double> margins; // one per test function (or per sample)
    double min_margin = 0.0;
    double mean_margin = 0.0;
    double threshold = 0.0;
    bool pass = true;
};

InequalityReport make_report(std::string id, std::vector<double> margins, double threshold);

enum class SemigroupInequality {
    log_sobolev,
    reversal_log_sobolev,
    poincare,
    reversal_poincare,
    gradient_estimate,
};

std::string inequality_id(SemigroupInequality which);

/// Time step for an inequality window [s, t]: the propagator default capped at
/// (t - s) / 100, below which the margins no longer move.
double inequality_step(const FlowScenario& scenario, double s, double t);

/// Pointwise margin field of one inequality for one f between s and t.
/// Poincare-type inequalities accept signed f; the others need f > 0.
Field inequality_margin_field(SemigroupInequality which, const FlowScenario& scenario,
                              const HeatPropagator& propagator, double s, double t,
                              const Field& f);

/// Evaluates one inequality over a family (all functions share one batched
/// evolution, so the result is deterministic and ordered by test index).
InequalityReport inequality_check(SemigroupInequality which, const FlowScenario& scenario,
                                  const HeatPropagator& propagator, double s, double t,
                                  const std::vector<Field>& family, const Tolerance& tolerance);

InequalityReport lsi_check(const FlowScenario& scenario, double s, double t,
                           const std::vector<Field>& family, const Tolerance& tolerance = {});
InequalityReport rlsi_check(const FlowScenario& scenario, double s, double t,
                            const std::vector<Field>& family, const Tolerance& tolerance = {});
InequalityReport poincare_check(const FlowScenario& scenario, double s, double t,
                                const std::vector<Field>& family, const Tolerance& tolerance = {});
InequalityReport rpoincare_check(const FlowScenario& scenario, double s, double t,
                                 const std::vector<Field>& family, const Tolerance& tolerance = {});
InequalityReport gradient_estimate_check(const FlowScenario& scenario, double s, double t,
                                         const std::vector<Field>& family,
                                         const Tolerance& tolerance = {});

/// All five in one pass over a shared propagator.
std::vector<InequalityReport> theorem_suite(const FlowScenario& scenario,
                                            const HeatPropagator& propagator, double s, double t,
                                            const std::vector<Field>& family,
                                            const Tolerance& tolerance);

struct HarnackReport {
    InequalityReport sharp;    // D_K(t) log(A/u) - |grad u|^2/u^2
    InequalityReport hamilton; // (1/t + 2K) log(A/u) - |grad u|^2/u^2
    bool dominance = true;     // hamilton margin >= sharp margin at every node and sample
    double K = 0.0;            // the Harnack rate (scenario is a (-K, inf) super flow)
};

/// Harnack margins along u(t) = P_{0,t} u0 at every scenario time t > 0 for
/// every u0; A is the maximum of u over all space-time samples of that run.
/// The scenario's K must be <= 0; the Harnack rate is -K.
HarnackReport harnack_check(const FlowScenario& scenario, const HeatPropagator& propagator,
                            const std::vector<Field>& initial_data, const Tolerance& tolerance);
HarnackReport harnack_check(const FlowScenario& scenario, const std::vector<Field>& initial_data,
                            const Tolerance& tolerance = {});

struct InterpolationResult {
    double max_residual = 0.0;        // max_r |alpha'(r) + P_{r,T}(Gamma term)| at the probe
    double integrated_residual = 0.0; // |alpha(T) - alpha(s) + int_s^T P_{r,T}(...) dr|
    std::size_t probe = 0;
    double step = 0.0;
};

/// alpha(r) = P_{r,T}(u_r log u_r)(x), u_r = P_{s,r} f, sampled at `samples`
/// uniform r in [s, T]. alpha' uses second-order central differences; the
/// Gamma term is the operator's own L(u log u) - (1 + log u) L u, which is
/// |grad u|^2/u up to O(h^2).
InterpolationResult interpolation_identity_check(const FlowScenario& scenario, double s, double T,
                                                 const Field& f, int samples = 11,
                                                 std::size_t probe = static_cast<std::size_t>(-1));

/// psi(t) = e^{-2K(T-t)} P_{t,T}(|grad P_{s,t} f|^2)(x) at uniform t in [s, T];
/// margins are psi(t_k) - psi(t_{k+1}).
InequalityReport psi_monotonicity_check(const FlowScenario& scenario, double s, double T,
                                        const Field& f, int samples = 11,
                                        std::size_t probe = static_cast<std::size_t>(-1),
                                        const Tolerance& tolerance = {});

/// Node with the largest |grad f|, the default probe.
std::size_t steepest_node(const Field& f, const FlowScenario& scenario, double t);

struct ContrapositiveReport {
    ResidualMinimum residual;
    std::vector<double> gaps;              // t - s values probed
    std::vector<InequalityReport> reports; // gradient estimate per gap
    bool detected = false;                 // some margin < -threshold
};

/// Gradient-estimate check with near-eigen functions at the residual minimum.
/// The h^2 allowance is multiplied by epsilon^2, the size of the margins of
/// 1 + epsilon v.
ContrapositiveReport contrapositive_check(const FlowScenario& scenario, double s,
                                          const std::vector<double>& gaps,
                                          const TestFamily& family, const Tolerance& tolerance = {});

} // namespace wlab
