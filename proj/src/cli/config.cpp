#include "wittenlab/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace wlab::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Key/value store that remembers which keys were read, so leftovers can be
// reported as unknown.
class Document {
public:
    explicit Document(const std::string& text) {
        std::istringstream in(text);
        std::string line, section;
        int number = 0;
        while (std::getline(in, line)) {
            ++number;
            if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError("", "line " + std::to_string(number) + ": unterminated section header");
                section = trim(std::string_view(line).substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("", "line " + std::to_string(number) + ": expected key = value");
            std::string key = trim(std::string_view(line).substr(0, eq));
            if (key.empty()) throw ConfigError("", "line " + std::to_string(number) + ": empty key");
            if (!section.empty()) key = section + "." + key;
            if (values_.count(key)) throw ConfigError(key, "given more than once");
            values_[key] = trim(std::string_view(line).substr(eq + 1));
        }
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::optional<std::string> text(const std::string& key) {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        used_.insert(key);
        if (it->second.empty()) throw ConfigError(key, "empty value");
        return it->second;
    }

    std::string required(const std::string& key) {
        auto v = text(key);
        if (!v) throw ConfigError(key, "required key is missing");
        return *v;
    }

    std::optional<double> number(const std::string& key) {
        auto v = text(key);
        if (!v) return std::nullopt;
        return parse_number(key, *v);
    }

    double number(const std::string& key, double fallback) { return number(key).value_or(fallback); }

    std::optional<long long> integer(const std::string& key) {
        auto v = text(key);
        if (!v) return std::nullopt;
        long long out = 0;
        const auto* end = v->data() + v->size();
        auto [p, ec] = std::from_chars(v->data(), end, out);
        if (ec != std::errc() || p != end) throw ConfigError(key, "expected an integer, got '" + *v + "'");
        return out;
    }

    static double parse_number(const std::string& key, const std::string& v) {
        double out = 0.0;
        const auto* end = v.data() + v.size();
        auto [p, ec] = std::from_chars(v.data(), end, out);
        if (ec != std::errc() || p != end || !std::isfinite(out))
            throw ConfigError(key, "expected a finite number, got '" + v + "'");
        return out;
    }

    void reject_unused() const {
        for (const auto& [key, value] : values_)
            if (!used_.count(key)) throw ConfigError(key, "unknown key");
    }

    /// Fails if `key` is present but was not read, for keys that only apply
    /// to other catalog entries.
    void forbid(const std::string& key, const std::string& why) {
        if (has(key) && !used_.count(key)) throw ConfigError(key, why);
    }

private:
    std::map<std::string, std::string> values_;
    std::set<std::string> used_;
};

template <class T>
T choose(const std::string& key, const std::string& value,
         std::initializer_list<std::pair<const char*, T>> options) {
    std::string names;
    for (const auto& [name, v] : options) {
        if (value == name) return v;
        names += names.empty() ? name : std::string(", ") + name;
    }
    throw ConfigError(key, "unknown name '" + value + "' (expected one of: " + names + ")");
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(key, what);
}

Point parse_point(const std::string& key, const std::string& v, int dimension) {
    const auto parts = split_list(v);
    require(static_cast<int>(parts.size()) == dimension, key,
            "expected " + std::to_string(dimension) + " comma-separated coordinate(s)");
    Point p{0.0, 0.0};
    for (int i = 0; i < dimension; ++i) p[static_cast<std::size_t>(i)] = Document::parse_number(key, parts[static_cast<std::size_t>(i)]);
    return p;
}

std::vector<TrigTerm> parse_terms(const std::string& key, const std::string& v, int dimension) {
    std::vector<TrigTerm> terms;
    for (const auto& item : split_list(v)) {
        std::vector<std::string> f;
        std::stringstream in(item);
        std::string part;
        while (std::getline(in, part, ':')) f.push_back(trim(part));
        require(f.size() == 3, key, "each term is coefficient:k1:k2, got '" + item + "'");
        TrigTerm t;
        t.coefficient = Document::parse_number(key, f[0]);
        const double k1 = Document::parse_number(key, f[1]);
        const double k2 = Document::parse_number(key, f[2]);
        require(k1 == std::round(k1) && k2 == std::round(k2), key, "wave numbers must be integers");
        require(dimension == 2 || k2 == 0.0, key, "k2 must be 0 in one dimension");
        t.k1 = static_cast<int>(k1);
        t.k2 = static_cast<int>(k2);
        terms.push_back(t);
    }
    require(!terms.empty(), key, "needs at least one term");
    return terms;
}

} // namespace

const std::vector<std::string>& check_catalog() {
    static const std::vector<std::string> ids = {
        "operator-identities", "bochner", "curvature-bound", "theorem-suite",
        "log-sobolev", "reversal-log-sobolev", "poincare", "reversal-poincare",
        "gradient-estimate", "contrapositive", "harnack", "entropy-monotonicity",
        "second-order-identity", "km-second-order", "ou-expansion", "interpolation",
        "psi-monotonicity"};
    return ids;
}

ScenarioConfig parse_config_text(const std::string& text) {
    Document doc(text);
    ScenarioConfig c;
    c.text = text;
    if (auto v = doc.text("name")) c.name = *v;

    c.domain = choose<DomainKind>("grid.domain", doc.required("grid.domain"),
                                  {{"box", DomainKind::euclidean_box}, {"torus", DomainKind::periodic_torus}});
    c.dimension = static_cast<int>(doc.integer("grid.dimension").value_or(1));
    require(c.dimension == 1 || c.dimension == 2, "grid.dimension", "must be 1 or 2");
    const auto points = doc.integer("grid.points_per_axis");
    require(points.has_value(), "grid.points_per_axis", "required key is missing");
    require(*points >= 8, "grid.points_per_axis", "must be at least 8");
    require(*points <= (c.dimension == 1 ? 1 << 16 : 1024), "grid.points_per_axis", "too large");
    c.points = static_cast<int>(*points);
    if (c.domain == DomainKind::euclidean_box) {
        c.half_width = doc.number("grid.half_width", 8.0);
        require(c.half_width > 0.0, "grid.half_width", "must be positive");
    } else {
        doc.forbid("grid.half_width", "only applies to box domains (the torus has period 2 pi)");
    }

    c.t_start = doc.number("time.start", 0.0);
    c.t_end = doc.number("time.end").value_or(1.0);
    c.t_count = static_cast<int>(doc.integer("time.count").value_or(11));
    require(c.t_start >= 0.0, "time.start", "must be >= 0");
    require(c.t_end > c.t_start, "time.end", "must exceed time.start");
    require(c.t_count >= 5, "time.count", "must be at least 5");

    const std::string variant = doc.text("metric.variant").value_or("static");
    enum { stat, expo, lin, conf };
    const int mv = choose<int>("metric.variant", variant,
                               {{"static", stat}, {"exponential-scaling", expo},
                                {"linear-scaling", lin}, {"conformal", conf}});
    if (mv == expo) {
        const double lambda = doc.number("metric.lambda").value_or(0.0);
        const double c0 = doc.number("metric.c0", 1.0);
        require(c0 > 0.0, "metric.c0", "must be positive");
        c.metric = MetricFamily::exponential_scaling(lambda, c0);
    } else if (mv == lin) {
        const double c0 = doc.number("metric.c0", 1.0);
        const double rate = doc.number("metric.rate", 0.0);
        require(c0 > 0.0, "metric.c0", "must be positive");
        require(c0 + rate * c.t_end > 0.0, "metric.rate", "c(t) = c0 + rate t must stay positive up to time.end");
        c.metric = MetricFamily::linear_scaling(c0, rate);
    } else if (mv == conf) {
        require(c.dimension == 2, "metric.variant", "conformal needs grid.dimension = 2");
        require(c.domain == DomainKind::periodic_torus, "metric.variant", "conformal needs grid.domain = torus");
        const double amp = doc.number("metric.amplitude", 0.05);
        const auto freq = doc.integer("metric.frequency").value_or(1);
        const double decay = doc.number("metric.decay", 0.0);
        const double phase = doc.number("metric.phase", 0.0);
        require(std::abs(amp) < 1.0, "metric.amplitude", "must satisfy |amplitude| < 1");
        require(freq >= 1 && freq <= 16, "metric.frequency", "must be an integer in [1, 16]");
        require(decay >= 0.0, "metric.decay", "must be >= 0");
        c.metric = MetricFamily::conformal(amp, static_cast<int>(freq), decay, phase);
    }
    for (const char* k : {"metric.lambda", "metric.c0", "metric.rate", "metric.amplitude",
                          "metric.frequency", "metric.decay", "metric.phase"})
        doc.forbid(k, "does not apply to metric.variant = " + variant);

    const auto mode = choose<CompatibilityMode>(
        "potential.mode", doc.text("potential.mode").value_or("fixed-measure"),
        {{"fixed-measure", CompatibilityMode::fixed_measure}, {"free", CompatibilityMode::free}});
    const std::string pk = doc.text("potential.kind").value_or("zero");
    const int kind = choose<int>("potential.kind", pk, {{"zero", 0}, {"quadratic", 1}, {"trig", 2}});
    if (kind == 0) {
        c.potential = PotentialFamily::zero(mode);
    } else if (kind == 1) {
        require(c.domain == DomainKind::euclidean_box, "potential.kind", "quadratic needs grid.domain = box");
        c.potential = PotentialFamily::quadratic(doc.number("potential.kappa", 1.0), mode);
    } else {
        c.potential = PotentialFamily::trig(parse_terms("potential.terms", doc.required("potential.terms"), c.dimension), mode);
    }
    doc.forbid("potential.kappa", "only applies to potential.kind = quadratic");
    doc.forbid("potential.terms", "only applies to potential.kind = trig");

    if (auto v = doc.text("flow.K"); v && *v != "measured") c.K = Document::parse_number("flow.K", *v);
    if (auto v = doc.text("flow.m"); v && *v != "inf") {
        const double m = Document::parse_number("flow.m", *v);
        require(m >= c.dimension, "flow.m", "must be at least grid.dimension (or inf)");
        c.m = ModelDimension::finite(m);
    }

    const std::string ik = doc.text("initial.kind").value_or("constant");
    c.initial.kind = choose<InitialKind>("initial.kind", ik,
                                         {{"constant", InitialKind::constant}, {"trig", InitialKind::trig},
                                          {"gaussian", InitialKind::gaussian}, {"near-delta", InitialKind::near_delta}});
    if (c.initial.kind == InitialKind::constant) {
        c.initial.value = doc.number("initial.value", 1.0);
        require(c.initial.value > 0.0, "initial.value", "must be positive");
    }
    if (c.initial.kind == InitialKind::trig) {
        c.initial.amplitude = doc.number("initial.amplitude", 0.5);
        c.initial.frequency = static_cast<int>(doc.integer("initial.frequency").value_or(1));
        require(std::abs(c.initial.amplitude) < 1.0, "initial.amplitude", "must satisfy |amplitude| < 1");
        require(c.initial.frequency >= 1, "initial.frequency", "must be >= 1");
    }
    if (c.initial.kind == InitialKind::gaussian) {
        c.initial.sigma = doc.number("initial.sigma", 1.0);
        require(c.initial.sigma > 0.0, "initial.sigma", "must be positive");
    }
    if (c.initial.kind == InitialKind::gaussian || c.initial.kind == InitialKind::near_delta)
        if (auto v = doc.text("initial.center")) c.initial.center = parse_point("initial.center", *v, c.dimension);
    for (const char* k : {"initial.value", "initial.amplitude", "initial.frequency", "initial.sigma", "initial.center"})
        doc.forbid(k, "does not apply to initial.kind = " + ik);

    if (auto v = doc.text("checks")) {
        for (const auto& id : split_list(*v)) {
            const auto& cat = check_catalog();
            require(std::find(cat.begin(), cat.end(), id) != cat.end(), "checks", "unknown check '" + id + "'");
            c.checks.push_back(id);
        }
    }

    if (auto v = doc.text("family.kind")) {
        try {
            c.family.kind = parse_family_kind(*v);
        } catch (const PreconditionError& e) {
            throw ConfigError("family.kind", e.what());
        }
    }
    c.family.count = static_cast<int>(doc.integer("family.count").value_or(50));
    require(c.family.count >= 1 && c.family.count <= 10000, "family.count", "must be in [1, 10000]");
    if (auto s = doc.integer("family.seed")) {
        require(*s >= 0, "family.seed", "must be >= 0");
        c.family.seed = static_cast<std::uint64_t>(*s);
    }
    c.family.floor = doc.number("family.floor", 1e-3);
    require(c.family.floor > 0.0 && c.family.floor < 1.0, "family.floor", "must lie in (0, 1)");
    c.family.epsilon = doc.number("family.epsilon", 1e-2);
    require(c.family.epsilon > 0.0 && c.family.epsilon < 0.5, "family.epsilon", "must lie in (0, 0.5)");

    c.tolerance.slack = doc.number("tolerance.slack", 1e-8);
    c.tolerance.h2_allowance = doc.number("tolerance.h2_allowance", 1.0);
    c.relative_tolerance = doc.number("tolerance.relative", 1e-3);
    c.identity_tolerance = doc.number("tolerance.identity", 1e-4);
    require(c.tolerance.slack >= 0.0, "tolerance.slack", "must be >= 0");
    require(c.tolerance.h2_allowance >= 0.0, "tolerance.h2_allowance", "must be >= 0");
    require(c.relative_tolerance >= 0.0, "tolerance.relative", "must be >= 0");
    require(c.identity_tolerance >= 0.0, "tolerance.identity", "must be >= 0");

    c.window_start = doc.number("window.start");
    c.window_end = doc.number("window.end");
    const double ws = c.window_start.value_or(c.t_start), we = c.window_end.value_or(c.t_end);
    require(ws >= c.t_start, "window.start", "must lie in the time grid");
    require(we > ws && we <= c.t_end, "window.end", "must exceed window.start and not pass time.end");

    if (auto v = doc.text("contrapositive.gaps")) {
        c.gaps.clear();
        for (const auto& g : split_list(*v)) {
            const double gap = Document::parse_number("contrapositive.gaps", g);
            require(gap > 0.0 && ws + gap <= c.t_end, "contrapositive.gaps", "each gap must be positive and fit in the time grid");
            c.gaps.push_back(gap);
        }
        require(!c.gaps.empty(), "contrapositive.gaps", "needs at least one gap");
    }
    c.harnack_count = static_cast<int>(doc.integer("harnack.count").value_or(20));
    require(c.harnack_count >= 1, "harnack.count", "must be >= 1");
    c.max_step = doc.number("solver.max_step", 0.0);
    require(c.max_step >= 0.0, "solver.max_step", "must be >= 0 (0 selects the default)");

    doc.reject_unused();

    // Build once so that module preconditions surface as configuration errors.
    try {
        (void)c.scenario();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("", std::string("scenario rejected: ") + e.what());
    }
    return c;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

Field ScenarioConfig::initial_datum(const GridSpec& grid) const {
    const InitialSpec& s = initial;
    switch (s.kind) {
    case InitialKind::constant: return Field(grid.size(), s.value);
    case InitialKind::trig:
        return sample(grid, [&](Point p) { return 1.0 + s.amplitude * std::cos(s.frequency * p[0]); });
    case InitialKind::gaussian: {
        Field f = sample(grid, [&](Point p) {
            double r2 = 0.0;
            for (int i = 0; i < grid.dimension(); ++i) r2 += std::pow(p[static_cast<std::size_t>(i)] - s.center[static_cast<std::size_t>(i)], 2);
            return std::exp(-r2 / (2.0 * s.sigma * s.sigma));
        });
        for (double v : f)
            if (!(v > 0.0)) throw ConfigError("initial.sigma", "gaussian underflows to zero on the grid; widen it");
        return f;
    }
    case InitialKind::near_delta: {
        // Gaussian of standard deviation 3h over a relative floor, normalised
        // to unit mass against the time-0 measure.
        const double sd = 3.0 * grid.spacing();
        Field f = sample(grid, [&](Point p) {
            double r2 = 0.0;
            for (int i = 0; i < grid.dimension(); ++i) r2 += std::pow(p[static_cast<std::size_t>(i)] - s.center[static_cast<std::size_t>(i)], 2);
            return std::exp(-r2 / (2.0 * sd * sd)) + 1e-12;
        });
        const auto mu = measure_weights(grid, metric, potential, t_start);
        double mass = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) mass += mu.weights[i] * f[i];
        for (double& v : f) v /= mass;
        return f;
    }
    }
    return {};
}

FlowScenario ScenarioConfig::scenario(int n) const {
    const int N = n > 0 ? n : points;
    const GridSpec grid = domain == DomainKind::euclidean_box ? GridSpec::box(dimension, N, half_width)
                                                              : GridSpec::torus(dimension, N);
    const auto times = uniform_times(t_start, t_end, t_count);
    FlowScenario s(grid, metric, potential, K.value_or(0.0), m, times, initial_datum(grid));
    if (!K) s = s.with_K(curvature_lower_bound(s, s.times(), m));
    return s;
}

std::string catalog_text() {
    std::ostringstream o;
    o << "Scenario keys (key = value; '[section]' prefixes following keys; '#' comments)\n\n"
         "  name                    free text\n"
         "  grid.domain             box | torus                              (required)\n"
         "  grid.dimension          1 | 2                                    [1]\n"
         "  grid.points_per_axis    integer >= 8                             (required)\n"
         "  grid.half_width         R of the box [-R, R]^n                   [8]\n"
         "  metric.variant          static | exponential-scaling | linear-scaling | conformal\n"
         "    exponential-scaling   c(t) = c0 e^{2 lambda t}: metric.lambda, metric.c0 [1]\n"
         "    linear-scaling        c(t) = c0 + rate t: metric.c0 [1], metric.rate\n"
         "    conformal             a = amplitude e^{-decay t} cos(frequency x1 - phase), 2-D torus:\n"
         "                          metric.amplitude [0.05], metric.frequency [1], metric.decay [0], metric.phase [0]\n"
         "  potential.kind          zero | quadratic (kappa |x|^2/2, potential.kappa [1])\n"
         "                          | trig (potential.terms = c:k1:k2, ...)\n"
         "  potential.mode          fixed-measure | free                     [fixed-measure]\n"
         "  flow.K                  number | measured                        [measured]\n"
         "  flow.m                  number >= dimension | inf                [inf]\n"
         "  time.start, time.end, time.count                                 [0, 1, 11]\n"
         "  initial.kind            constant (initial.value) | trig (initial.amplitude, initial.frequency)\n"
         "                          | gaussian (initial.sigma, initial.center) | near-delta (initial.center)\n"
         "  checks                  comma list of check ids (below)\n"
         "  family.kind             random-trig | gaussian-bumps | near-eigen [random-trig]\n"
         "  family.count, family.seed, family.floor, family.epsilon          [50, 1, 1e-3, 1e-2]\n"
         "  window.start, window.end  inequality window                      [time grid ends]\n"
         "  contrapositive.gaps     comma list of t - s                      [1e-2]\n"
         "  harnack.count           initial data for the Harnack check       [20]\n"
         "  tolerance.slack, tolerance.h2_allowance                          [1e-8, 1]\n"
         "  tolerance.relative      entropy identities, relative             [1e-3]\n"
         "  tolerance.identity      integrated interpolation residual        [1e-4]\n"
         "  solver.max_step         0 selects min(h, time spacing) / 4       [0]\n\n"
         "Checks\n";
    for (const auto& id : check_catalog()) o << "  " << id << "\n";
    return o.str();
}

} // namespace wlab::cli
