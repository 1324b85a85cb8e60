#include "doctest.h"
#include "wittenlab/entropy.hpp"

#include <cmath>
#include <numbers>

using namespace wlab;

namespace {

FlowScenario flat_circle(Field f, std::vector<double> times, int N = 64) {
    return FlowScenario(GridSpec::torus(1, N), MetricFamily::euclidean(), PotentialFamily::zero(),
                        0.0, ModelDimension::infinite(), std::move(times), std::move(f));
}

FlowScenario ou_soliton(int N, std::vector<double> times) {
    const auto grid = GridSpec::box(1, N, 8.0);
    Field f = sample(grid, [](Point p) { return std::exp(-p[0] * p[0] / 8.0 + 0.3 * p[0]); });
    return FlowScenario(grid, MetricFamily::euclidean(), PotentialFamily::quadratic(1.0), 1.0,
                        ModelDimension::infinite(), std::move(times), std::move(f));
}

} // namespace

TEST_CASE("entropy coefficient identities") {
    for (double K : {-1.0, -0.1, 0.0, 0.1, 1.0}) {
        const EntropyCoefficients c(K);
        for (double t : {1e-3, 1e-2, 0.1, 0.5, 1.0, 3.0, 10.0}) {
            const double D = c.D(t), C = c.C(t);
            CHECK(std::abs(D - C - 2.0 * K) <= 1e-12 * std::max(1.0, D));
            CHECK(2.0 * c.beta(t) * D == doctest::Approx(c.dissipation_weight(t)).epsilon(1e-12));
            // D' = -C D, by a sixth-order central difference
            const double e = 1e-3 * t;
            const double dD = (-c.D(t - 3 * e) + 9 * c.D(t - 2 * e) - 45 * c.D(t - e) + 45 * c.D(t + e) -
                               9 * c.D(t + 2 * e) + c.D(t + 3 * e)) / (60 * e);
            CHECK(dD == doctest::Approx(-C * D).epsilon(1e-8));
            if (K != 0.0) {
                CHECK(c.two_k_coth(t) == doctest::Approx(2.0 * K / std::tanh(K * t)).epsilon(1e-12));
                CHECK(c.alpha(t) == doctest::Approx(K * std::tanh(K * t)).epsilon(1e-12));
            }
        }
    }
    const EntropyCoefficients zero(0.0);
    CHECK(zero.C(0.5) == 2.0);
    CHECK(zero.D(0.5) == 2.0);
    CHECK(zero.beta(0.5) == 0.5);
    CHECK(zero.two_k_coth(0.5) == 4.0);
    CHECK(zero.alpha(0.5) == 0.0);
    CHECK_THROWS_AS(zero.C(0.0), PreconditionError);
}

TEST_CASE("series and closed-form branches agree across the seam") {
    for (double K : {1e-6, -1e-6}) {
        const EntropyCoefficients series(K, CoefficientBranch::series);
        const EntropyCoefficients closed(K, CoefficientBranch::closed_form);
        CHECK(series.uses_series(1.0));
        CHECK_FALSE(closed.uses_series(1.0));
        for (double t : {1e-3, 0.1, 1.0, 10.0}) {
            CHECK(series.C(t) == doctest::Approx(closed.C(t)).epsilon(1e-8));
            CHECK(series.D(t) == doctest::Approx(closed.D(t)).epsilon(1e-8));
            CHECK(series.beta(t) == doctest::Approx(closed.beta(t)).epsilon(1e-8));
            CHECK(series.two_k_coth(t) == doctest::Approx(closed.two_k_coth(t)).epsilon(1e-8));
            CHECK(series.alpha(t) == doctest::Approx(closed.alpha(t)).epsilon(1e-8));
        }
    }
}

TEST_CASE("fourth-order time differences are exact on quartics") {
    std::vector<double> v;
    const double h = 0.1;
    for (int k = 0; k < 8; ++k) {
        const double t = 0.3 + k * h;
        v.push_back(1 - 2 * t + 0.5 * t * t + t * t * t - 0.25 * t * t * t * t);
    }
    const Field d1 = time_derivative(v, h, 1);
    const Field d2 = time_derivative(v, h, 2);
    for (int k = 0; k < 8; ++k) {
        const double t = 0.3 + k * h;
        CHECK(d1[k] == doctest::Approx(-2 + t + 3 * t * t - t * t * t).epsilon(1e-10));
        if (k >= 2 && k <= 5) CHECK(d2[k] == doctest::Approx(1 + 6 * t - 3 * t * t).epsilon(1e-10));
    }
    const double uneven[] = {0, 1, 2, 3.5, 4};
    CHECK_FALSE(is_uniform(uneven));
    CHECK_THROWS_AS(time_derivative(std::span<const double>(uneven, 4), 1.0, 1), PreconditionError);
}

TEST_CASE("relative entropy and Fisher information") {
    const auto grid = GridSpec::torus(1, 32);
    WeightedMeasure mu;
    mu.weights.assign(grid.size(), 1.0 / 32);
    CHECK(entropy_rel(Field(grid.size(), 1.0), mu) == 0.0);
    CHECK(entropy_rel(Field(grid.size(), 2.0), mu) == doctest::Approx(2.0 * std::log(2.0)));

    // int_0^{2pi} (sin^2 x / 4) / (1 + cos x / 2) dx
    const double exact = 0.841787214476932925;
    double err[2];
    int k = 0;
    for (int N : {64, 128}) {
        const Field f = sample(GridSpec::torus(1, N), [](Point p) { return 1.0 + 0.5 * std::cos(p[0]); });
        const auto s = flat_circle(f, uniform_times(0, 1, 5), N);
        err[k++] = std::abs(fisher(f, s, 0.0) - exact);
        CHECK(fisher_pointwise(f, s, 0.0) == doctest::Approx(exact).epsilon(4e-3));
        CHECK(fisher(Field(f.size(), 3.0), s, 0.0) == 0.0);
    }
    CHECK(err[0] < 1e-3);
    CHECK(std::log2(err[0] / err[1]) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("constant datum has a flat entropy curve") {
    const auto s = flat_circle(Field(64, 1.0), uniform_times(0.0, 0.5, 6));
    const auto c = h_entropy_curve(s);
    CHECK(c.size() == 5);
    for (std::size_t k = 0; k < c.size(); ++k) {
        CHECK(std::abs(c.H[k]) < 1e-10);
        CHECK(std::abs(c.W[k]) < 1e-10);
        CHECK(std::abs(c.dW[k]) < 1e-10);
        CHECK(std::abs(c.rhs[k]) < 1e-20);
    }
}

TEST_CASE("finite-difference dH/dt agrees with the dissipation identity") {
    const Field f = sample(GridSpec::torus(1, 64), [](Point p) { return std::exp(0.5 * std::cos(p[0])); });
    const auto s = flat_circle(f, uniform_times(0.0, 0.15, 13));
    const HeatPropagator P(s, 2.5e-4);
    const auto c = h_entropy_curve(s, P);
    for (std::size_t k = 0; k < c.size(); ++k) {
        CHECK(c.dH[k] <= 1e-8);
        // the first samples still carry the start-up transient of the stepper
        if (!c.one_sided[k] && k >= 3) CHECK(std::abs(c.dH[k] - c.dH_identity[k]) < 1e-6);
        // K = 0: beta = t and W = d/dt (t H)
        CHECK(c.W[k] == doctest::Approx(c.H[k] + c.t[k] * c.dH[k]).epsilon(1e-14));
    }
}

TEST_CASE("H_K tends to the Fisher information as t -> 0") {
    const Field f = sample(GridSpec::torus(1, 64), [](Point p) { return std::exp(0.5 * std::cos(p[0])); });
    const auto s = flat_circle(f, uniform_times(0.0, 5e-3, 6));
    const HeatPropagator P(s, 1e-4);
    const auto c = h_entropy_curve(s, P);
    // H(t) = I(f) + a t + O(t^2): linear extrapolation from the first two samples
    const double extrapolated = 2.0 * c.H[0] - c.H[1];
    CHECK(extrapolated == doctest::Approx(fisher(f, s, 0.0)).epsilon(1e-4));
}

TEST_CASE("OU soliton: W_K dissipation and the second-order equality") {
    const auto s = ou_soliton(256, uniform_times(0.0, 0.6, 13));
    const HeatPropagator P(s, 2e-3);
    const auto c = h_entropy_curve(s, P);
    for (std::size_t k = 0; k < c.size(); ++k) {
        CHECK(c.dH[k] <= 1e-8);
        CHECK(std::abs(c.curvature_integral[k]) < 1e-8 * c.hessian_integral[k] + 1e-12);
        if (c.one_sided[k]) continue;
        const double scale = std::abs(c.rhs[k]);
        CHECK(std::abs(c.dW[k] - c.rhs[k]) < 2e-3 * scale);
        CHECK(std::abs(c.dW_identity[k] - c.rhs[k]) < 2e-3 * scale);
        const auto so = second_order_lhs(c, c.t[k]);
        const EntropyCoefficients co(1.0);
        CHECK(std::abs(so.lhs - so.identity) < 2e-3 * 2.0 * co.D(c.t[k]) * c.hessian_integral[k]);
    }
    CHECK_THROWS_AS(second_order_lhs(c, c.t.front()), PreconditionError);
    CHECK_THROWS_AS(km_second_order_lhs(c, c.t[4], ModelDimension::finite(1.0), 1), InvalidDimensionError);
}

TEST_CASE("H_{m,K} needs a unit-mass initial datum") {
    const auto grid = GridSpec::box(1, 64, 6.0);
    Field f = sample(grid, [](Point p) { return std::exp(-p[0] * p[0] / 0.5); });
    const auto mu = measure_weights(grid, MetricFamily::euclidean(), PotentialFamily::zero(), 0.0);
    double mass = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) mass += mu.weights[i] * f[i];
    Field g = f;
    for (auto& v : f) v /= mass;
    for (auto& v : g) v *= 2.0 / mass;
    auto make = [&](Field d) {
        return FlowScenario(grid, MetricFamily::euclidean(), PotentialFamily::zero(), 0.0,
                            ModelDimension::infinite(), uniform_times(0.0, 0.05, 6), std::move(d));
    };
    const auto c = hmk_wmk_curve(make(f), ModelDimension::finite(1.0));
    CHECK(c.size() == 5);
    CHECK_THROWS_AS(hmk_wmk_curve(make(g), ModelDimension::finite(1.0)), PreconditionError);
    CHECK(hmk_subtractor(2.0, 0.0, 1.0 / (4.0 * std::numbers::pi)) == doctest::Approx(1.0));
}
