#include "wittenlab/cli.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <iostream>

namespace wlab::cli {

namespace {

void summarise(const RunReport& r, std::ostream& out) {
    if (r.json.contains("checks"))
        for (const auto& c : r.json["checks"]) {
            out << (c["pass"].get<bool>() ? "PASS  " : "FAIL  ") << c["id"].get<std::string>();
            if (c.contains("error")) out << "  (" << c["error"].get<std::string>() << ")";
            else if (c.contains("min_margin")) out << "  min margin " << c["min_margin"].get<double>();
            out << "\n";
        }
    if (r.json.contains("convergence"))
        for (const auto& row : r.json["convergence"]) {
            out << row["id"].get<std::string>() << ": " << row["status"].get<std::string>();
            if (row["order"].is_number()) out << ", order " << row["order"].get<double>();
            out << "\n";
        }
    out << "verdict: " << r.json["verdict"].get<std::string>() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heat-semigroup and entropy checks on discretised weighted manifolds"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "wittenlab-out";
    std::uint64_t seed = 0;
    bool quiet = false, timing = false;
    int levels = 3;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "scenario file")->required();
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "test-family seed (overrides family.seed)");
        sub->add_flag("--quiet", quiet, "print nothing on success");
        sub->add_flag("--timing", timing, "record wall time in the report");
    };
    auto* run_cmd = app.add_subcommand("run", "run the checks listed in a scenario file");
    add_common(run_cmd);
    auto* study_cmd = app.add_subcommand("study", "grid convergence study of the residual checks");
    add_common(study_cmd);
    study_cmd->add_option("--levels", levels, "number of refinement levels (>= 3)")->required();
    app.add_subcommand("list-catalog", "list scenario keys, catalog names and check ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (app.got_subcommand("list-catalog")) {
        std::cout << catalog_text();
        return 0;
    }

    const auto start = std::chrono::steady_clock::now();
    RunOptions options;
    options.timing = timing;
    bool seed_given = false;
    for (auto* sub : {run_cmd, study_cmd})
        if (sub->parsed() && sub->count("--seed")) seed_given = true;
    if (seed_given) options.seed = seed;

    RunReport report;
    try {
        const ScenarioConfig config = parse_config(config_path);
        if (run_cmd->parsed()) {
            report = run(config, options);
        } else {
            if (levels < 3) throw ConfigError("--levels", "a convergence study needs at least 3 levels");
            report = convergence_study(config, levels, options);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        write_report(report, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (!quiet || !report.pass) summarise(report, report.pass ? std::cout : std::cerr);
    if (!quiet)
        std::cerr << "wall time " << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
                  << " s\n";
    return report.pass ? 0 : 1;
}

} // namespace wlab::cli
