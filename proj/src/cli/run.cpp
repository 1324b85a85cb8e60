#include "wittenlab/cli.hpp"
#include "wittenlab/entropy.hpp"
#include "wittenlab/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>

namespace wlab::cli {

using json = nlohmann::ordered_json;

std::string sha256_hex(const std::string& text); // output.cpp

namespace {

constexpr double exact_floor = 1e-10;

json inequality_entry(const InequalityReport& r) {
    return {{"id", r.id},          {"pass", r.pass},           {"min_margin", r.min_margin},
            {"mean_margin", r.mean_margin}, {"threshold", r.threshold}, {"margins", r.margins}};
}

// Everything a run shares between checks: the scenario, its propagator and
// the entropy curve, built on first use.
class Context {
public:
    Context(const ScenarioConfig& config, std::uint64_t seed)
        : config_(config), scenario_(config.scenario()), seed_(seed) {}

    const ScenarioConfig& config() const { return config_; }
    const FlowScenario& scenario() const { return scenario_; }
    std::uint64_t seed() const { return seed_; }
    double window_start() const { return config_.window_start.value_or(config_.t_start); }
    double window_end() const { return config_.window_end.value_or(config_.t_end); }

    TestFamily family(int count = -1) const {
        TestFamily f = config_.family;
        f.seed = seed_;
        if (count > 0) f.count = count;
        return f;
    }

    const HeatPropagator& propagator() {
        if (!propagator_) propagator_ = std::make_unique<HeatPropagator>(scenario_, config_.max_step);
        return *propagator_;
    }

    const HeatPropagator& window_propagator() {
        if (!window_propagator_) {
            const double step = config_.max_step > 0.0
                                    ? config_.max_step
                                    : inequality_step(scenario_, window_start(), window_end());
            window_propagator_ = std::make_unique<HeatPropagator>(scenario_, step);
        }
        return *window_propagator_;
    }

    const std::vector<Field>& window_family() {
        if (!family_) family_ = generate_family(family(), scenario_, window_start());
        return *family_;
    }

    const EntropyCurve& curve() {
        if (!curve_) curve_ = h_entropy_curve(scenario_, propagator());
        return *curve_;
    }

private:
    const ScenarioConfig& config_;
    FlowScenario scenario_;
    std::uint64_t seed_;
    std::unique_ptr<HeatPropagator> propagator_, window_propagator_;
    std::optional<std::vector<Field>> family_;
    std::optional<EntropyCurve> curve_;
};

json check_operator_identities(Context& ctx) {
    const FlowScenario& s = ctx.scenario();
    std::mt19937_64 rng(ctx.seed());
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> when(s.times().front(), s.final_time());
    double worst_sym = 0.0, worst_ibp = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
        const WittenOperator L(s, when(rng));
        Field u(L.size()), v(L.size());
        for (auto& x : u) x = unit(rng);
        for (auto& x : v) x = unit(rng);
        const double luv = L.inner(L.apply(u), v);
        const double ulv = L.inner(u, L.apply(v));
        const double scale = std::sqrt(L.dirichlet(u, u) * L.dirichlet(v, v));
        worst_sym = std::max(worst_sym, std::abs(luv - ulv) / scale);
        worst_ibp = std::max(worst_ibp, std::abs(luv + L.dirichlet(u, v)) / scale);
    }
    const double tol = 1e-12;
    return {{"pass", worst_sym <= tol && worst_ibp <= tol},
            {"draws", 20},
            {"self_adjointness", worst_sym},
            {"integration_by_parts", worst_ibp},
            {"threshold", tol}};
}

double bochner_at(const ScenarioConfig& config, int points, double t) {
    const FlowScenario s = config.scenario(points);
    return bochner_residual(s.initial(), s, t);
}

json check_bochner(Context& ctx) {
    const ScenarioConfig& c = ctx.config();
    const double r1 = bochner_residual(ctx.scenario().initial(), ctx.scenario(), c.t_start);
    const double r2 = bochner_at(c, 2 * c.points, c.t_start);
    json out = {{"residual", r1}, {"residual_refined", r2}};
    if (r1 <= exact_floor && r2 <= exact_floor) {
        out["order"] = "exact";
        out["pass"] = true;
    } else {
        const double order = std::log2(r1 / r2);
        out["order"] = order;
        out["pass"] = order >= 1.7;
    }
    return out;
}

json check_curvature_bound(Context& ctx) {
    const FlowScenario& s = ctx.scenario();
    double lo = std::numeric_limits<double>::infinity(), dev = 0.0;
    for (double t : s.times()) {
        const Field r = super_flow_residual(s, t, s.m(), s.K());
        for (double v : r) {
            lo = std::min(lo, v);
            dev = std::max(dev, std::abs(v));
        }
    }
    const double tol = ctx.config().tolerance.slack;
    return {{"pass", lo >= -tol},
            {"K", s.K()},
            {"K_source", ctx.config().K ? "declared" : "measured"},
            {"min_residual", lo},
            {"max_abs_residual", dev},
            {"threshold", tol}};
}

json check_contrapositive(Context& ctx) {
    const auto r = contrapositive_check(ctx.scenario(), ctx.window_start(), ctx.config().gaps,
                                        ctx.family(), ctx.config().tolerance);
    json gaps = json::array();
    for (std::size_t i = 0; i < r.gaps.size(); ++i)
        gaps.push_back({{"gap", r.gaps[i]},
                        {"min_margin", r.reports[i].min_margin},
                        {"threshold", r.reports[i].threshold}});
    // detection of a negative margin is the expected outcome
    return {{"pass", r.detected},
            {"detected", r.detected},
            {"residual_minimum", r.residual.value},
            {"residual_node", r.residual.node},
            {"gaps", gaps}};
}

json check_harnack(Context& ctx) {
    const auto data = generate_family(ctx.family(ctx.config().harnack_count), ctx.scenario(), 0.0);
    const auto r = harnack_check(ctx.scenario(), ctx.propagator(), data, ctx.config().tolerance);
    return {{"pass", r.sharp.pass && r.hamilton.pass && r.dominance},
            {"harnack_rate", r.K},
            {"dominance", r.dominance},
            {"sharp", inequality_entry(r.sharp)},
            {"hamilton", inequality_entry(r.hamilton)}};
}

json check_entropy_monotonicity(Context& ctx) {
    const EntropyCurve& c = ctx.curve();
    const EntropyCoefficients co(c.K);
    const double slack = ctx.config().tolerance.slack;
    const double rel = ctx.config().relative_tolerance;
    double worst_h = std::numeric_limits<double>::infinity();
    double worst_w = worst_h;
    bool pass = true;
    std::size_t w_samples = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double mh = -c.dH[k];
        worst_h = std::min(worst_h, mh);
        if (mh < -slack) pass = false;
        // the W bound is an equality on solitons; one-sided stencils at the
        // ends of the time grid are too coarse to resolve its sign
        if (c.one_sided[k]) continue;
        ++w_samples;
        const double bound = -co.dissipation_weight(c.t[k]) * c.hessian_integral[k];
        const double mw = bound - c.dW[k];
        worst_w = std::min(worst_w, mw);
        if (mw < -(slack + rel * std::abs(bound))) pass = false;
    }
    if (w_samples == 0) throw PreconditionError("no curve sample away from the ends of the time grid");
    return {{"pass", pass},
            {"min_h_margin", worst_h},
            {"min_w_margin", worst_w},
            {"h_samples", c.size()},
            {"w_samples", w_samples}};
}

json check_second_order(Context& ctx) {
    const EntropyCurve& c = ctx.curve();
    const EntropyCoefficients co(c.K);
    const double slack = ctx.config().tolerance.slack;
    const double rel = ctx.config().relative_tolerance;
    double worst = 0.0, top = -std::numeric_limits<double>::infinity();
    bool pass = true;
    std::size_t used = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (c.one_sided[k]) continue;
        ++used;
        const double scale = 2.0 * co.D(c.t[k]) * c.hessian_integral[k] + std::abs(c.second_order_identity[k]);
        const double gap = std::abs(c.second_order_lhs[k] - c.second_order_identity[k]);
        worst = std::max(worst, scale > 0.0 ? gap / scale : gap);
        top = std::max(top, c.second_order_lhs[k]);
        if (gap > slack + rel * scale || c.second_order_lhs[k] > slack + rel * scale) pass = false;
    }
    if (used == 0) throw PreconditionError("no curve sample away from the ends of the time grid");
    return {{"pass", pass}, {"max_relative_gap", worst}, {"max_lhs", top}, {"samples", used}};
}

json check_km_second_order(Context& ctx) {
    const ModelDimension m = ctx.scenario().m();
    if (m.is_infinite()) throw PreconditionError("km-second-order needs a finite flow.m");
    const EntropyCurve& c = ctx.curve();
    const EntropyCoefficients co(c.K);
    const double slack = ctx.config().tolerance.slack;
    const double rel = ctx.config().relative_tolerance;
    double top = -std::numeric_limits<double>::infinity();
    bool pass = true;
    std::size_t used = 0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (c.one_sided[k]) continue;
        ++used;
        const double v = km_second_order_lhs(c, c.t[k], m, ctx.scenario().dimension());
        const double scale = 2.0 * co.D(c.t[k]) * c.fisher[k] * c.fisher[k] / m.value();
        top = std::max(top, v);
        if (v > slack + rel * scale) pass = false;
    }
    if (used == 0) throw PreconditionError("no curve sample away from the ends of the time grid");
    return {{"pass", pass}, {"max_lhs", top}, {"samples", used}};
}

json check_ou_expansion(Context& ctx) {
    const FlowScenario& s = ctx.scenario();
    OUParams p;
    p.m = s.m().is_infinite() ? s.dimension() : static_cast<int>(std::lround(s.m().value()));
    p.K = s.K();
    std::vector<double> h, r;
    for (int i = 0; i <= 20; ++i) {
        const double t = 1e-3 * std::pow(100.0, i / 20.0);
        h.push_back(t);
        r.push_back(std::abs(ou_entropy_expansion(p, t).remainder));
    }
    const double largest = *std::max_element(r.begin(), r.end());
    json out = {{"m", p.m}, {"K", p.K}, {"max_remainder", largest}};
    if (largest <= 1e-14) {
        out["slope"] = "exact";
        out["pass"] = true;
    } else {
        const double slope = fitted_order(h, r);
        out["slope"] = slope;
        out["pass"] = slope >= 3.0;
    }
    return out;
}

json check_interpolation(Context& ctx) {
    const auto r = interpolation_identity_check(ctx.scenario(), ctx.window_start(), ctx.window_end(),
                                                ctx.scenario().initial());
    const double tol = ctx.config().identity_tolerance;
    return {{"pass", r.integrated_residual <= tol},
            {"integrated_residual", r.integrated_residual},
            {"max_residual", r.max_residual},
            {"probe", r.probe},
            {"sample_step", r.step},
            {"threshold", tol}};
}

json check_psi(Context& ctx) {
    const auto r = psi_monotonicity_check(ctx.scenario(), ctx.window_start(), ctx.window_end(),
                                          ctx.scenario().initial(), 11, static_cast<std::size_t>(-1),
                                          ctx.config().tolerance);
    return inequality_entry(r);
}

std::optional<SemigroupInequality> single_inequality(const std::string& id) {
    for (auto w : {SemigroupInequality::log_sobolev, SemigroupInequality::reversal_log_sobolev,
                   SemigroupInequality::poincare, SemigroupInequality::reversal_poincare,
                   SemigroupInequality::gradient_estimate})
        if (inequality_id(w) == id) return w;
    return std::nullopt;
}

void run_check(Context& ctx, const std::string& id, json& checks) {
    auto record = [&](const std::string& name, json body) {
        json entry = {{"id", name}};
        for (auto& [k, v] : body.items())
            if (k != "id") entry[k] = v;
        checks.push_back(std::move(entry));
    };
    try {
        if (id == "theorem-suite") {
            for (const auto& r : theorem_suite(ctx.scenario(), ctx.window_propagator(), ctx.window_start(),
                                               ctx.window_end(), ctx.window_family(), ctx.config().tolerance))
                record(r.id, inequality_entry(r));
        } else if (auto w = single_inequality(id)) {
            record(id, inequality_entry(inequality_check(*w, ctx.scenario(), ctx.window_propagator(),
                                                         ctx.window_start(), ctx.window_end(),
                                                         ctx.window_family(), ctx.config().tolerance)));
        } else {
            static const std::map<std::string, std::function<json(Context&)>> table = {
                {"operator-identities", check_operator_identities},
                {"bochner", check_bochner},
                {"curvature-bound", check_curvature_bound},
                {"contrapositive", check_contrapositive},
                {"harnack", check_harnack},
                {"entropy-monotonicity", check_entropy_monotonicity},
                {"second-order-identity", check_second_order},
                {"km-second-order", check_km_second_order},
                {"ou-expansion", check_ou_expansion},
                {"interpolation", check_interpolation},
                {"psi-monotonicity", check_psi}};
            record(id, table.at(id)(ctx));
        }
    } catch (const std::exception& e) {
        record(id, {{"pass", false}, {"error", e.what()}});
    }
}

CurveTable entropy_table(const EntropyCurve& c) {
    CurveTable t{"entropy", {"t", "H_K", "dH", "d2H", "W_K", "dW", "rhs", "fisher", "hessian_integral"}, {}};
    for (std::size_t k = 0; k < c.size(); ++k)
        t.rows.push_back({c.t[k], c.H[k], c.dH[k], c.d2H[k], c.W[k], c.dW[k], c.rhs[k], c.fisher[k],
                          c.hessian_integral[k]});
    return t;
}

CurveTable hmk_table(const HmkCurve& c) {
    CurveTable t{"hmk", {"t", "entropy", "H_mK", "dH", "W_mK", "dW"}, {}};
    for (std::size_t k = 0; k < c.size(); ++k)
        t.rows.push_back({c.t[k], c.entropy[k], c.H[k], c.dH[k], c.W[k], c.dW[k]});
    return t;
}

json scenario_block(const FlowScenario& s, const ScenarioConfig& c) {
    return {{"name", c.name},
            {"domain", s.grid().periodic() ? "torus" : "box"},
            {"dimension", s.dimension()},
            {"points_per_axis", s.grid().points_per_axis()},
            {"spacing", s.grid().spacing()},
            {"K", s.K()},
            {"K_source", c.K ? "declared" : "measured"},
            {"m", s.m().str()},
            {"times", s.times()}};
}

json provenance(const ScenarioConfig& c, std::uint64_t seed) {
    return {{"tool", "wittenlab"}, {"version", WITTENLAB_VERSION}, {"config_sha256", sha256_hex(c.text)}, {"seed", seed}};
}

using Clock = std::chrono::steady_clock;

} // namespace

RunReport run(const ScenarioConfig& config, const RunOptions& options) {
    const auto start = Clock::now();
    const std::uint64_t seed = options.seed.value_or(config.family.seed);
    Context ctx(config, seed);

    RunReport report;
    json& j = report.json;
    j["provenance"] = provenance(config, seed);
    j["scenario"] = scenario_block(ctx.scenario(), config);

    json checks = json::array();
    for (const auto& id : config.checks) run_check(ctx, id, checks);

    json curves = json::object();
    try {
        report.curves.push_back(entropy_table(ctx.curve()));
        curves["entropy"] = {{"file", "entropy.csv"}, {"samples", ctx.curve().size()}};
    } catch (const std::exception& e) {
        curves["entropy"] = {{"error", e.what()}};
    }
    if (config.initial.kind == InitialKind::near_delta && !config.m.is_infinite()) {
        try {
            report.curves.push_back(hmk_table(hmk_wmk_curve(ctx.scenario(), config.m)));
            curves["hmk"] = {{"file", "hmk.csv"}, {"samples", report.curves.back().rows.size()}};
        } catch (const std::exception& e) {
            curves["hmk"] = {{"error", e.what()}};
        }
    }

    for (const auto& c : checks) report.pass = report.pass && c["pass"].get<bool>();
    for (const auto& [name, c] : curves.items()) report.pass = report.pass && !c.contains("error");
    j["checks"] = std::move(checks);
    j["curves"] = std::move(curves);
    j["verdict"] = report.pass ? "pass" : "fail";
    if (options.timing)
        j["provenance"]["wall_time_s"] = std::chrono::duration<double>(Clock::now() - start).count();
    return report;
}

double fitted_order(std::span<const double> h, std::span<const double> residual) {
    if (h.size() != residual.size() || h.size() < 2) throw PreconditionError("order fit needs two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double x = std::log(h[i]), y = std::log(residual[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

// Space and time sampling are refined together: the W dissipation residual
// involves time differences over the sample grid.
struct StudyLevel {
    int points;
    double h;
    double step;
    int t_count;
};

// Relative residuals of the entropy identities at one level.
// Only samples at or after `t_min` count, so every level is scored over the
// same physical times.
std::pair<double, double> curve_residuals(ScenarioConfig config, const StudyLevel& level, double t_min) {
    config.t_count = level.t_count;
    const FlowScenario s = config.scenario(level.points);
    const HeatPropagator P(s, level.step);
    const EntropyCurve c = h_entropy_curve(s, P);
    const EntropyCoefficients co(c.K);
    double second = 0.0, dissipation = 0.0, second_scale = 0.0, rhs_scale = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (c.one_sided[k] || c.t[k] < t_min - 1e-12) continue;
        second = std::max(second, std::abs(c.second_order_lhs[k] - c.second_order_identity[k]));
        second_scale = std::max(second_scale, 2.0 * co.D(c.t[k]) * c.hessian_integral[k]);
        dissipation = std::max(dissipation, std::abs(c.dW[k] - c.rhs[k]));
        rhs_scale = std::max(rhs_scale, std::abs(c.rhs[k]));
    }
    return {second_scale > 0 ? second / second_scale : second, rhs_scale > 0 ? dissipation / rhs_scale : dissipation};
}

double measured_K(const ScenarioConfig& config, int points) {
    const FlowScenario s = config.scenario(points);
    return curvature_lower_bound(s, s.times(), s.m());
}

double ibp_residual(const ScenarioConfig& config, int points, std::uint64_t seed) {
    const FlowScenario s = config.scenario(points);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double worst = 0.0;
    for (double t : {s.times().front(), s.final_time()}) {
        const WittenOperator L(s, t);
        Field u(L.size()), v(L.size());
        for (auto& x : u) x = unit(rng);
        for (auto& x : v) x = unit(rng);
        const double scale = std::sqrt(L.dirichlet(u, u) * L.dirichlet(v, v));
        worst = std::max(worst, std::abs(L.inner(L.apply(u), v) + L.dirichlet(u, v)) / scale);
    }
    return worst;
}

json table_row(const std::string& id, const std::vector<StudyLevel>& levels, const std::vector<double>& r) {
    json lv = json::array();
    std::vector<double> h;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        lv.push_back({{"points_per_axis", levels[i].points}, {"h", levels[i].h}, {"residual", r[i]}});
        h.push_back(levels[i].h);
    }
    json row = {{"id", id}, {"levels", lv}};
    if (*std::max_element(r.begin(), r.end()) <= exact_floor) {
        row["status"] = "exact";
        row["order"] = nullptr;
        return row;
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < r.size(); ++i) decreasing = decreasing && r[i] < r[i - 1];
    const bool positive = std::all_of(r.begin(), r.end(), [](double x) { return x > 0.0; });
    row["order"] = positive ? json(fitted_order(h, r)) : json(nullptr);
    row["status"] = decreasing && positive ? "converged" : "no convergence";
    return row;
}

} // namespace

RunReport convergence_study(const ScenarioConfig& config, int levels, const RunOptions& options) {
    if (levels < 3) throw PreconditionError("a convergence study needs at least 3 levels");
    const auto start = Clock::now();
    const std::uint64_t seed = options.seed.value_or(config.family.seed);
    const FlowScenario base = config.scenario();
    const double base_step = config.max_step > 0.0 ? config.max_step : HeatPropagator(base).max_step();

    const int limit = config.dimension == 1 ? 1 << 16 : 1024;
    std::vector<StudyLevel> lv;
    for (int k = 0; k < levels; ++k) {
        const int points = config.points << k;
        if (points > limit)
            throw PreconditionError("refinement level " + std::to_string(k) + " exceeds the grid size limit");
        lv.push_back({points, base.grid().spacing() / (1 << k), base_step / (1 << k),
                      (config.t_count - 1) * (1 << k) + 1});
    }

    auto has = [&](const char* id) {
        return std::find(config.checks.begin(), config.checks.end(), id) != config.checks.end();
    };
    json table = json::array();
    auto add = [&](const std::string& id, const std::function<double(const StudyLevel&)>& fn) {
        std::vector<double> r;
        for (const auto& l : lv) r.push_back(fn(l));
        table.push_back(table_row(id, lv, r));
    };
    if (has("operator-identities"))
        add("operator-identities", [&](const StudyLevel& l) { return ibp_residual(config, l.points, seed); });
    if (has("bochner"))
        add("bochner", [&](const StudyLevel& l) { return bochner_at(config, l.points, config.t_start); });
    // Self-convergence of the measured bound against one further refinement:
    // the super-flow residual itself need not vanish as h -> 0.
    if (has("curvature-bound")) {
        const int reference = config.points << levels;
        if (reference > limit)
            throw PreconditionError("curvature-bound reference level exceeds the grid size limit");
        const double K_ref = measured_K(config, reference);
        add("curvature-bound", [&](const StudyLevel& l) { return std::abs(measured_K(config, l.points) - K_ref); });
    }
    if (has("second-order-identity") || has("entropy-monotonicity")) {
        std::vector<std::pair<double, double>> rs;
        const double t_min = config.t_start + 2.0 * (config.t_end - config.t_start) / (config.t_count - 1);
        for (const auto& l : lv) rs.push_back(curve_residuals(config, l, t_min));
        std::vector<double> a, b;
        for (auto [x, y] : rs) {
            a.push_back(x);
            b.push_back(y);
        }
        table.push_back(table_row("second-order-identity", lv, a));
        table.push_back(table_row("w-dissipation", lv, b));
    }
    if (table.empty())
        throw ConfigError("checks", "no residual check to study (operator-identities, bochner, curvature-bound, "
                                    "second-order-identity, entropy-monotonicity)");

    RunReport report;
    json& j = report.json;
    j["provenance"] = provenance(config, seed);
    j["scenario"] = scenario_block(base, config);
    for (const auto& row : table) report.pass = report.pass && row["status"] != "no convergence";
    j["convergence"] = std::move(table);
    j["verdict"] = report.pass ? "pass" : "fail";
    if (options.timing)
        j["provenance"]["wall_time_s"] = std::chrono::duration<double>(Clock::now() - start).count();
    return report;
}

} // namespace wlab::cli
