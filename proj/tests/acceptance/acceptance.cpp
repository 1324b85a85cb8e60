// One PASS/FAIL line per acceptance criterion. Exit status 0 iff all pass.

#include "wittenlab/cli.hpp"
#include "wittenlab/entropy.hpp"
#include "wittenlab/inequalities.hpp"
#include "wittenlab/operators.hpp"
#include "wittenlab/oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace wlab;
using json = nlohmann::ordered_json;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const std::string ou_text = R"(name = ou-soliton
[grid]
domain = box
points_per_axis = 256
half_width = 8
[potential]
kind = quadratic
kappa = 1
[flow]
K = 1
[time]
end = 1
count = 41
[initial]
kind = gaussian
sigma = 2
center = 1.2
[family]
kind = gaussian-bumps
count = 50
seed = 7
)";

const std::string scaling_text = R"(name = isotropic-scaling
[grid]
domain = box
points_per_axis = 256
[metric]
variant = exponential-scaling
lambda = 0.2
[potential]
kind = quadratic
kappa = 1
mode = fixed-measure
[flow]
K = measured
[time]
end = 1
count = 41
[initial]
kind = gaussian
sigma = 2
center = 0.5
[family]
count = 50
seed = 11
)";

const std::string conformal_text = R"(name = conformal-torus
[grid]
domain = torus
dimension = 2
points_per_axis = 32
[metric]
variant = conformal
amplitude = 0.05
frequency = 1
decay = 0.5
[flow]
K = measured
[time]
end = 1
count = 41
[initial]
kind = trig
amplitude = 0.3
[family]
count = 50
seed = 13
)";

// Hess phi = -0.5 at x = 0, so K = 0 is violated there.
const std::string violating_text = R"(name = violating-circle
contrapositive.gaps = 1e-2
[grid]
domain = torus
points_per_axis = 128
[potential]
kind = trig
terms = 0.5:1:0
[flow]
K = 0
[time]
end = 0.1
count = 11
[family]
count = 10
)";

cli::RunReport run_checks(const std::string& text, std::vector<std::string> checks) {
    auto config = cli::parse_config_text(text);
    config.checks = std::move(checks);
    return cli::run(config);
}

std::string failing(const json& checks) {
    std::string out;
    for (const auto& c : checks)
        if (!c["pass"].get<bool>()) out += (out.empty() ? "" : ",") + c["id"].get<std::string>();
    return out.empty() ? "none" : out;
}

// 1. Self-adjointness and integration by parts on random draws.
Outcome operator_identities() {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> unit(-1.0, 1.0), when(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, 5);
    double worst = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
        const int kind = pick(rng);
        const double a = 0.5 + 0.5 * unit(rng) * unit(rng);
        std::optional<FlowScenario> s;
        const auto times = uniform_times(0.0, 1.0, 5);
        auto build = [&](GridSpec g, MetricFamily m, PotentialFamily p) {
            s.emplace(g, m, p, 0.0, ModelDimension::infinite(), times, Field(g.size(), 1.0));
        };
        switch (kind) {
        case 0: build(GridSpec::torus(1, 64), MetricFamily::euclidean(),
                      PotentialFamily::trig({{a, 1, 0}, {0.3 * unit(rng), 3, 0}})); break;
        case 1: build(GridSpec::box(1, 96, 6.0), MetricFamily::euclidean(), PotentialFamily::quadratic(a)); break;
        case 2: build(GridSpec::box(1, 96, 6.0), MetricFamily::exponential_scaling(0.3 * unit(rng)),
                      PotentialFamily::quadratic(a, CompatibilityMode::fixed_measure)); break;
        case 3: build(GridSpec::torus(2, 24), MetricFamily::conformal(0.1 * a, 1, 0.5, unit(rng)),
                      PotentialFamily::trig({{0.3 * unit(rng), 1, 1}})); break;
        case 4: build(GridSpec::box(2, 24, 4.0), MetricFamily::euclidean(), PotentialFamily::quadratic(a)); break;
        default: build(GridSpec::torus(2, 24), MetricFamily::euclidean(),
                       PotentialFamily::trig({{a, 1, 0}, {0.2, 0, 2}})); break;
        }
        const WittenOperator L(*s, when(rng));
        Field u(L.size()), v(L.size());
        for (auto& x : u) x = unit(rng);
        for (auto& x : v) x = unit(rng);
        const double luv = L.inner(L.apply(u), v), ulv = L.inner(u, L.apply(v));
        const double scale = std::sqrt(L.dirichlet(u, u) * L.dirichlet(v, v));
        worst = std::max({worst, std::abs(luv - ulv) / scale, std::abs(luv + L.dirichlet(u, v)) / scale});
    }
    return {worst <= 1e-12, fmt("worst relative residual %.2e over 20 draws (tol 1e-12)", worst)};
}

// 2. Observed order of the Bochner residual.
Outcome bochner_order() {
    auto ou = [](int N) {
        const auto g = GridSpec::box(1, N, 8.0);
        return FlowScenario(g, MetricFamily::euclidean(), PotentialFamily::quadratic(1.0), 1.0,
                            ModelDimension::infinite(), uniform_times(0.0, 1.0, 5), Field(g.size(), 1.0));
    };
    std::vector<double> h, r;
    for (int N : {64, 128, 256}) {
        const auto s = ou(N);
        h.push_back(s.grid().spacing());
        r.push_back(bochner_residual(sample(s.grid(), [](Point p) { return std::sin(p[0]) * std::exp(-p[0] * p[0] / 16.0); }),
                                     s, 0.3));
    }
    const double order1 = cli::fitted_order(h, r);

    auto conformal = [](int N) {
        const auto g = GridSpec::torus(2, N);
        return FlowScenario(g, MetricFamily::conformal(0.05, 1, 0.5, 0.0), PotentialFamily::zero(), 0.0,
                            ModelDimension::infinite(), uniform_times(0.0, 1.0, 5), Field(g.size(), 1.0));
    };
    double r2[2];
    int k = 0;
    for (int N : {32, 64}) {
        const auto s = conformal(N);
        r2[k++] = bochner_residual(
            sample(s.grid(), [](Point p) { return std::sin(p[0]) * std::cos(p[1]) + 0.3 * std::cos(2 * p[1]); }), s,
            0.3);
    }
    const double order2 = std::log2(r2[0] / r2[1]);
    auto in = [](double o) { return o >= 1.7 && o <= 2.3; };
    return {in(order1) && in(order2),
            fmt("order %.3f (1-D 64/128/256), %.3f (2-D conformal 32^2/64^2), band [1.7, 2.3]", order1, order2)};
}

// 3. Gaussian soliton: Ric(L) = K Id exactly for phi = K|x|^2/2.
Outcome soliton_exactness() {
    double worst = 0.0;
    for (int dim : {1, 2})
        for (double K : {0.5, 1.0, 2.0}) {
            const auto g = GridSpec::box(dim, dim == 1 ? 128 : 48, 5.0);
            const FlowScenario s(g, MetricFamily::euclidean(), PotentialFamily::quadratic(K), K,
                                 ModelDimension::infinite(), uniform_times(0.0, 1.0, 5), Field(g.size(), 1.0));
            const auto ric = bakry_emery_ricci(s, 0.5, ModelDimension::infinite());
            for (std::size_t i = 0; i < ric.size(); ++i) {
                worst = std::max({worst, std::abs(ric[i].xx - K), std::abs(ric[i].xy)});
                if (dim == 2) worst = std::max(worst, std::abs(ric[i].yy - K));
            }
        }
    return {worst <= 1e-10, fmt("max |Ric(L) - K Id| = %.2e (tol 1e-10), 1-D and 2-D, K in {0.5, 1, 2}", worst)};
}

// 4. Five semigroup inequalities on three super flows, and the contrapositive.
Outcome theorem_suite_criterion() {
    bool pass = true;
    std::string detail;
    for (const auto* text : {&ou_text, &scaling_text, &conformal_text}) {
        const auto r = run_checks(*text, {"curvature-bound", "theorem-suite"});
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& c : r.json["checks"])
            if (c.contains("min_margin")) worst = std::min(worst, c["min_margin"].get<double>());
        pass = pass && r.pass;
        detail += fmt("%s min margin %.2e (failed: %s); ", r.json["scenario"]["name"].get<std::string>().c_str(),
                      worst, failing(r.json["checks"]).c_str());
    }
    const auto v = run_checks(violating_text, {"contrapositive"});
    const auto& c = v.json["checks"][0];
    const bool detected = c.contains("detected") && c["detected"].get<bool>();
    const double residual = c.value("residual_minimum", 0.0);
    pass = pass && detected && residual <= -0.1;
    detail += fmt("violating residual %.3f, detected at gap 1e-2: %s", residual, detected ? "yes" : "no");
    return {pass, detail};
}

// 5. Harnack inequalities on (-K, inf) super flows.
Outcome harnack_criterion() {
    static const std::string circle = R"(name = bent-circle
harnack.count = 20
[grid]
domain = torus
points_per_axis = 128
[potential]
kind = trig
terms = 0.5:1:0
[flow]
K = measured
[time]
end = 1
count = 11
)";
    std::string flat = ou_text;
    flat.replace(flat.find("K = 1"), 5, "K = 0");
    const std::string& ou_flat = flat;
    bool pass = true;
    std::string detail;
    for (const std::string* text : {&circle, &ou_flat, &conformal_text}) {
        auto config = cli::parse_config_text(*text);
        config.harnack_count = 20;
        config.checks = {"harnack"};
        const auto r = cli::run(config);
        const auto& c = r.json["checks"][0];
        pass = pass && r.pass;
        detail += fmt("%s K=%.3g sharp %.2e ham %.2e dominance %s; ", r.json["scenario"]["name"].get<std::string>().c_str(),
                      r.json["scenario"]["K"].get<double>(), c["sharp"]["min_margin"].get<double>(),
                      c["hamilton"]["min_margin"].get<double>(), c["dominance"].get<bool>() ? "yes" : "no");
    }
    return {pass, detail};
}

// 6. Equality case on the OU soliton under simultaneous refinement.
Outcome soliton_equality() {
    std::string text = ou_text;
    text.replace(text.find("points_per_axis = 256"), 21, "points_per_axis = 64");
    text.replace(text.find("count = 41"), 10, "count = 11");
    auto config = cli::parse_config_text(text);
    config.checks = {"second-order-identity"};
    const auto study = cli::convergence_study(config, 3);
    bool pass = true;
    std::string detail;
    for (const auto& row : study.json["convergence"]) {
        const double finest = row["levels"].back()["residual"].get<double>();
        const double order = row["order"].is_number() ? row["order"].get<double>() : 0.0;
        pass = pass && order >= 1.7 && finest <= 1e-3;
        detail += fmt("%s order %.2f, %.2e at 256; ", row["id"].get<std::string>().c_str(), order, finest);
    }
    return {pass, detail + "need order >= 1.7 and <= 1e-3"};
}

// 7. dH <= 0 and the W dissipation bound on every super flow of the suite.
Outcome monotonicity() {
    bool pass = true;
    std::string detail;
    for (const auto* text : {&ou_text, &scaling_text, &conformal_text}) {
        const auto r = run_checks(*text, {"entropy-monotonicity"});
        const auto& c = r.json["checks"][0];
        pass = pass && r.pass;
        detail += fmt("%s dH margin %.2e W margin %.2e; ", r.json["scenario"]["name"].get<std::string>().c_str(),
                      c.value("min_h_margin", 0.0), c.value("min_w_margin", 0.0));
    }
    return {pass, detail};
}

// 8. The CD(K, m) second-order inequality.
Outcome km_inequality() {
    bool pass = true;
    std::string detail;
    for (int m : {3, 10}) {
        std::string text = R"(name = cd-km
[grid]
domain = box
points_per_axis = 256
half_width = 4
[potential]
kind = quadratic
kappa = 1
[flow]
K = measured
m = )" + std::to_string(m) + R"(
[time]
end = 1
count = 41
[initial]
kind = gaussian
sigma = 1
center = 0.3
)";
        const auto r = run_checks(text, {"curvature-bound", "km-second-order"});
        pass = pass && r.pass;
        detail += fmt("m=%d K=%.3g max lhs %.2e (failed: %s); ", m, r.json["scenario"]["K"].get<double>(),
                      r.json["checks"][1].value("max_lhs", 0.0), failing(r.json["checks"]).c_str());
    }
    return {pass, detail};
}

double trapezoid_entropy(const OUParams& p, double t) {
    const double sd = std::sqrt(ou_variance(p.K, t));
    const int n = p.m == 1 ? 20000 : 1200;
    const double R = 12.0 * sd + 1.0, dy = 2.0 * R / n;
    double sum = 0.0;
    std::vector<double> y(p.m);
    const int outer = p.m == 1 ? 1 : n + 1;
    for (int j = 0; j < outer; ++j)
        for (int i = 0; i <= n; ++i) {
            y[0] = -R + i * dy;
            double w = (i == 0 || i == n) ? 0.5 : 1.0;
            if (p.m == 2) {
                y[1] = -R + j * dy;
                w *= (j == 0 || j == n) ? 0.5 : 1.0;
            }
            const double u = ou_kernel(p, y, t);
            if (u > 0.0) sum += w * u * std::log(u);
        }
    return sum * std::pow(dy, p.m);
}

// 9. OU kernel entropy and the small-time expansion of H_{m,K}.
Outcome probabilistic() {
    double worst_q = 0.0;
    for (int m : {1, 2})
        for (double K : {-0.5, 0.5, 1.0})
            for (double t : {0.25, 1.0}) {
                const OUParams p{m, K, m == 1 ? std::vector<double>{0.2} : std::vector<double>{0.2, -0.1}};
                worst_q = std::max(worst_q, std::abs(trapezoid_entropy(p, t) - ou_kernel_entropy(p, t)));
            }
    double worst_slope = std::numeric_limits<double>::infinity();
    for (int m : {1, 2, 3})
        for (double K : {-1.0, 0.5, 1.0}) {
            std::vector<double> t, r;
            for (int i = 0; i <= 20; ++i) {
                t.push_back(1e-3 * std::pow(100.0, i / 20.0));
                r.push_back(std::abs(ou_entropy_expansion({m, K, {}}, t.back()).remainder));
            }
            worst_slope = std::min(worst_slope, cli::fitted_order(t, r));
        }
    return {worst_q <= 1e-6 && worst_slope >= 3.0,
            fmt("quadrature gap %.2e (tol 1e-6), min remainder slope %.3f on [1e-3, 1e-1] (need >= 3)", worst_q,
                worst_slope)};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// 10. K -> 0 seam.
Outcome k_seam() {
    double coeff = 0.0, literal = 0.0;
    for (double K : {1e-6, -1e-6}) {
        const EntropyCoefficients series(K, CoefficientBranch::series);
        const EntropyCoefficients closed(K, CoefficientBranch::closed_form);
        const EntropyCoefficients zero(0.0);
        for (double t : {1e-2, 0.1, 1.0, 10.0}) {
            coeff = std::max({coeff, rel(series.C(t), closed.C(t)), rel(series.D(t), closed.D(t)),
                              rel(series.beta(t), closed.beta(t)), rel(series.two_k_coth(t), closed.two_k_coth(t)),
                              rel(series.alpha(t), closed.alpha(t)),
                              rel(series.dissipation_weight(t), closed.dissipation_weight(t))});
            literal = std::max({literal, rel(series.beta(t), zero.beta(t)),
                                rel(series.two_k_coth(t), zero.two_k_coth(t))});
        }
    }

    // W_K along one flow with the automatic (series) branch against W_K
    // rebuilt from the same entropies with closed-form coefficients.
    const auto g = GridSpec::torus(1, 64);
    const FlowScenario s(g, MetricFamily::euclidean(), PotentialFamily::zero(), 1e-6, ModelDimension::infinite(),
                         uniform_times(0.0, 1.0, 21),
                         sample(g, [](Point p) { return 1.0 + 0.4 * std::cos(p[0]); }));
    const EntropyCurve c = h_entropy_curve(s);
    const EntropyCoefficients closed(1e-6, CoefficientBranch::closed_form);
    Field H(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) H[k] = closed.D(c.t[k]) * (c.initial_entropy - c.entropy[k]);
    const Field dH = time_derivative(H, c.t[1] - c.t[0], 1);
    double w = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) w = std::max(w, rel(c.W[k], H[k] + closed.beta(c.t[k]) * dH[k]));

    // Harnack constants: the sharp rate D_K and Hamilton's 1/t + 2K at K = 1e-6
    // against the K = 0 value 1/t with the series correction.
    double harnack = 0.0;
    for (double t : {1e-2, 0.1, 1.0}) {
        const EntropyCoefficients auto_branch(1e-6), closed_k(1e-6, CoefficientBranch::closed_form);
        harnack = std::max(harnack, rel(auto_branch.D(t), closed_k.D(t)));
        harnack = std::max(harnack, rel(1.0 / t + 2e-6, EntropyCoefficients(0.0).D(t) + 2e-6));
    }
    const bool pass = coeff <= 1e-8 && literal <= 1e-8 && w <= 1e-8 && harnack <= 1e-8;
    return {pass, fmt("coefficients %.2e, even quantities vs K=0 %.2e, W_K %.2e, Harnack %.2e (tol 1e-8)", coeff,
                      literal, w, harnack)};
}

struct Criterion {
    int number;
    const char* name;
    double limit_s; // 0: no runtime limit
    std::function<Outcome()> check;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "operator identities", 5.0, operator_identities},
        {2, "Bochner convergence order", 60.0, bochner_order},
        {3, "Gaussian soliton exactness", 0.0, soliton_exactness},
        {4, "semigroup inequality suite", 300.0, theorem_suite_criterion},
        {5, "Harnack inequalities", 0.0, harnack_criterion},
        {6, "soliton equality case", 120.0, soliton_equality},
        {7, "entropy monotonicity", 0.0, monotonicity},
        {8, "CD(K,m) inequality", 0.0, km_inequality},
        {9, "probabilistic interpretation", 120.0, probabilistic},
        {10, "K -> 0 seam", 0.0, k_seam},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_s > 0.0 && secs > c.limit_s) {
            o.pass = false;
            o.detail += fmt(" [over the %.0f s limit]", c.limit_s);
        }
        if (!o.pass) ++failed;
        std::printf("%s  %2d %-30s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.number, c.name, secs, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
