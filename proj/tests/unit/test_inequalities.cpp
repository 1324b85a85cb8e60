#include "doctest.h"
#include "wittenlab/inequalities.hpp"

#include <cmath>
#include <numbers>

using namespace wlab;

namespace {

FlowScenario flat_circle(int N, std::vector<double> times = uniform_times(0.0, 1.0, 11)) {
    const auto grid = GridSpec::torus(1, N);
    return FlowScenario(grid, MetricFamily::euclidean(), PotentialFamily::zero(), 0.0,
                        ModelDimension::infinite(), std::move(times), Field(grid.size(), 1.0));
}

FlowScenario ou_box(int N) {
    const auto grid = GridSpec::box(1, N, 8.0);
    return FlowScenario(grid, MetricFamily::euclidean(), PotentialFamily::quadratic(1.0), 1.0,
                        ModelDimension::infinite(), uniform_times(0.0, 1.0, 11),
                        Field(grid.size(), 1.0));
}

FlowScenario bent_circle() {
    const auto grid = GridSpec::torus(1, 128);
    return FlowScenario(grid, MetricFamily::euclidean(), PotentialFamily::trig({{0.5, 1, 0}}), 0.0,
                        ModelDimension::infinite(), uniform_times(0.0, 1.0, 11),
                        Field(grid.size(), 1.0));
}

} // namespace

TEST_CASE("family names round-trip and generation is deterministic") {
    for (auto k : {FamilyKind::random_trig, FamilyKind::gaussian_bumps, FamilyKind::near_eigen})
        CHECK(parse_family_kind(family_kind_name(k)) == k);
    CHECK_THROWS_AS(parse_family_kind("sawtooth"), PreconditionError);

    const auto s = ou_box(128);
    TestFamily fam;
    fam.count = 8;
    fam.seed = 42;
    const auto a = generate_family(fam, s);
    const auto b = generate_family(fam, s);
    REQUIRE(a.size() == 8);
    CHECK(a == b);
    fam.seed = 43;
    CHECK(generate_family(fam, s) != a);
    for (const auto& f : a)
        for (double v : f) {
            CHECK(v >= fam.floor);
            CHECK(v <= 1.0 / fam.floor);
        }
}

TEST_CASE("constant test functions give zero margins") {
    const auto s = ou_box(128);
    const HeatPropagator P(s);
    const std::vector<Field> family(3, Field(s.grid().size(), 2.5));
    for (const auto& r : theorem_suite(s, P, 0.0, 0.2, family, {})) {
        CHECK(std::abs(r.min_margin) < 1e-10);
        CHECK(r.pass);
    }
}

TEST_CASE("gradient estimate margin matches the Fourier solution on the flat circle") {
    // f = 1 + 0.3 sin(kx): P_t f = 1 + 0.3 e^{-k^2 t} sin(kx) and
    // P_t |f'|^2 = 0.09 k^2 (1 + e^{-4k^2 t} cos(2kx)) / 2.
    const double k = 2.0, tau = 0.05;
    double previous = 0.0;
    for (int N : {64, 128}) {
        const auto s = flat_circle(N);
        const Field f = sample(s.grid(), [&](Point p) { return 1.0 + 0.3 * std::sin(k * p[0]); });
        const HeatPropagator P(s, 1e-4);
        const Field m = inequality_margin_field(SemigroupInequality::gradient_estimate, s, P, 0.0, tau, f);
        double err = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double x = s.grid().node(i)[0];
            const double Pgrad = 0.045 * k * k * (1.0 + std::exp(-4 * k * k * tau) * std::cos(2 * k * x));
            const double du = 0.3 * k * std::exp(-k * k * tau) * std::cos(k * x);
            err = std::max(err, std::abs(m[i] - (Pgrad - du * du)));
        }
        CHECK(err < 2e-2);
        if (previous > 0.0) CHECK(std::log2(previous / err) > 1.8);
        previous = err;
    }
}

TEST_CASE("log-Sobolev linearises to half the Poincare margin") {
    const auto s = ou_box(128);
    const HeatPropagator P(s, 1e-3);
    const Field g = sample(s.grid(), [](Point p) { return std::sin(0.7 * p[0]) * std::exp(-p[0] * p[0] / 16); });
    const Field pm = inequality_margin_field(SemigroupInequality::poincare, s, P, 0.0, 0.1, g);
    const std::size_t probe = s.grid().size() / 2 + 10;
    REQUIRE(pm[probe] > 1e-4);
    double previous = 0.0;
    for (double eps : {1e-2, 5e-3}) {
        Field f = g;
        for (double& v : f) v = 1.0 + eps * v;
        const Field lm = inequality_margin_field(SemigroupInequality::log_sobolev, s, P, 0.0, 0.1, f);
        const double ratio = lm[probe] / (0.5 * eps * eps * pm[probe]);
        const double dev = std::abs(ratio - 1.0);
        CHECK(dev < 0.05);
        if (previous > 0.0) CHECK(dev < 0.7 * previous);
        previous = dev;
    }
}

TEST_CASE("theorem suite passes on the OU box with the declared allowance") {
    const auto s = ou_box(256);
    const HeatPropagator P(s, inequality_step(s, 0.0, 0.1));
    TestFamily fam;
    fam.count = 10;
    fam.kind = FamilyKind::gaussian_bumps;
    const auto family = generate_family(fam, s);
    for (const auto& r : theorem_suite(s, P, 0.0, 0.1, family, {1e-8, 1.0})) {
        INFO(r.id << " min margin " << r.min_margin);
        CHECK(r.pass);
        CHECK(r.margins.size() == 10);
    }
}

TEST_CASE("Harnack margins on the flat circle and Hamilton dominance") {
    const auto s = flat_circle(128, uniform_times(0.0, 0.5, 11));
    TestFamily fam;
    fam.count = 6;
    const auto data = generate_family(fam, s);
    const auto h = harnack_check(s, data);
    CHECK(h.K == 0.0);
    CHECK(h.dominance);
    CHECK(h.sharp.pass);
    CHECK(h.hamilton.pass);
    // at K = 0 both constants are 1/t
    CHECK(h.sharp.min_margin == doctest::Approx(h.hamilton.min_margin).epsilon(1e-12));

    const auto negative = s.with_K(-0.3);
    const auto hn = harnack_check(negative, data);
    CHECK(hn.K == 0.3);
    CHECK(hn.dominance);
    for (std::size_t i = 0; i < data.size(); ++i) CHECK(hn.hamilton.margins[i] >= hn.sharp.margins[i]);

    CHECK_THROWS_AS(harnack_check(s.with_K(0.5), data), PreconditionError);
}

TEST_CASE("interpolation identity residual is second order in the sample spacing") {
    const auto s = ou_box(128);
    const Field f = sample(s.grid(), [](Point p) { return 1.0 + 0.5 * std::exp(-(p[0] - 0.5) * (p[0] - 0.5)); });
    // close to r = s the third derivative of alpha is large, so the ratio
    // reaches 4 only once the spacing is small against that transient
    const auto coarse = interpolation_identity_check(s, 0.0, 0.4, f, 41);
    const auto fine = interpolation_identity_check(s, 0.0, 0.4, f, 81);
    CHECK(coarse.probe == fine.probe);
    CHECK(fine.step == doctest::Approx(coarse.step / 2));
    const double ratio = coarse.max_residual / fine.max_residual;
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.25));
    CHECK(fine.integrated_residual < 1e-6);
    CHECK_THROWS_AS(interpolation_identity_check(s, 0.0, 0.4, f, 4), PreconditionError);
}

TEST_CASE("psi is non-increasing on a super flow") {
    const auto s = ou_box(128);
    const Field f = sample(s.grid(), [](Point p) { return 1.0 + 0.5 * std::sin(p[0]) * std::exp(-p[0] * p[0] / 8); });
    const auto r = psi_monotonicity_check(s, 0.0, 0.5, f, 11, static_cast<std::size_t>(-1), {1e-8, 1.0});
    CHECK(r.margins.size() == 10);
    CHECK(r.pass);
}

TEST_CASE("contrapositive detects a violated curvature bound") {
    const auto s = bent_circle();
    const auto res = residual_minimum(s, 0.0);
    CHECK(res.value == doctest::Approx(-0.5).epsilon(1e-3));
    CHECK(std::abs(s.grid().node(res.node)[0]) < 1e-12);

    TestFamily fam;
    fam.count = 10;
    const auto c = contrapositive_check(s, 0.0, {1e-2}, fam);
    CHECK(c.detected);
    CHECK(c.reports[0].min_margin < -1e-7);

    // the same functions on a scenario whose bound holds give no detection
    const auto ok = s.with_K(-0.5);
    CHECK_FALSE(contrapositive_check(ok, 0.0, {1e-2}, fam).detected);
}

TEST_CASE("inequality windows are validated") {
    const auto s = ou_box(64);
    const std::vector<Field> fam(1, Field(s.grid().size(), 1.0));
    CHECK_THROWS_AS(lsi_check(s, 0.5, 0.2, fam), PreconditionError);
    CHECK_THROWS_AS(lsi_check(s, 0.0, 2.0, fam), PreconditionError);
    const std::vector<Field> signed_fam(1, Field(s.grid().size(), -1.0));
    CHECK_THROWS_AS(lsi_check(s, 0.0, 0.1, signed_fam), PositivityError);
    CHECK_NOTHROW(poincare_check(s, 0.0, 0.1, signed_fam));
}
