#pragma once

// Scenario files, experiment runs and convergence studies.
//
// A scenario file is a key = value document. Keys are dotted paths
// (grid.points_per_axis); a "[grid]" line prefixes the keys that follow it.
// '#' starts a comment. `catalog_text()` lists every key and catalog name.

#include "wittenlab/geometry.hpp"
#include "wittenlab/inequalities.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wlab::cli {

enum class InitialKind { constant, trig, gaussian, near_delta };

struct InitialSpec {
    InitialKind kind = InitialKind::constant;
    double value = 1.0;     // constant
    double amplitude = 0.5; // trig: 1 + amplitude cos(frequency x1)
    int frequency = 1;
    double sigma = 1.0;     // gaussian: exp(-|x - center|^2 / (2 sigma^2))
    Point center{0.0, 0.0}; // gaussian, near-delta
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::string text; // the file as read, hashed into the report

    DomainKind domain = DomainKind::euclidean_box;
    int dimension = 1;
    int points = 0;
    double half_width = 8.0;

    MetricFamily metric = MetricFamily::euclidean();
    PotentialFamily potential = PotentialFamily::zero();
    std::optional<double> K; // empty: measured from the super-flow residual
    ModelDimension m = ModelDimension::infinite();

    double t_start = 0.0;
    double t_end = 1.0;
    int t_count = 11;

    InitialSpec initial;
    std::vector<std::string> checks;

    TestFamily family;
    Tolerance tolerance{1e-8, 1.0};
    double relative_tolerance = 1e-3; // entropy-curve identities, relative to their scale
    double identity_tolerance = 1e-4; // integrated interpolation residual
    std::optional<double> window_start, window_end;
    std::vector<double> gaps{1e-2};
    int harnack_count = 20;
    double max_step = 0.0; // 0: propagator default

    /// The scenario at `points` per axis (0: the configured resolution).
    FlowScenario scenario(int points = 0) const;
    /// Initial datum on `grid` for the configured catalog entry.
    Field initial_datum(const GridSpec& grid) const;
};

/// Throws ConfigError naming the key path on unknown keys, missing required
/// keys and out-of-range values.
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig parse_config(const std::filesystem::path& path);

/// Every check id accepted in `checks`.
const std::vector<std::string>& check_catalog();
std::string catalog_text();

struct RunOptions {
    std::optional<std::uint64_t> seed; // overrides family.seed
    bool timing = false;               // add wall time to the report
};

struct CurveTable {
    std::string name; // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct RunReport {
    nlohmann::ordered_json json;
    std::vector<CurveTable> curves;
    bool pass = true;
};

/// Runs the configured checks in order. Errors raised inside a check are
/// recorded in that check's entry, which is marked failed.
RunReport run(const ScenarioConfig& config, const RunOptions& options = {});

/// Reruns the residual checks of `config` at h, h/2, ..., h/2^(levels-1) and
/// fits the observed order by least squares on log residuals. levels >= 3.
RunReport convergence_study(const ScenarioConfig& config, int levels,
                            const RunOptions& options = {});

/// Writes report.json and one CSV per curve into `dir`, each file written to
/// a temporary name first and then renamed.
void write_report(const RunReport& report, const std::filesystem::path& dir);

/// Least-squares slope of -log(residual) against log(1/h).
double fitted_order(std::span<const double> h, std::span<const double> residual);

/// Entry point of the command-line tool; returns the process exit code.
int main(int argc, char** argv);

} // namespace wlab::cli
