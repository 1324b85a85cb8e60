#include "doctest.h"
#include "wittenlab/cli.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

using namespace wlab;
using namespace wlab::cli;

namespace {

const std::string circle = R"(name = circle
[grid]
domain = torus
points_per_axis = 32
[time]
end = 0.2
count = 9
[initial]
kind = trig
amplitude = 0.3
)";

std::string with(const std::string& extra) { return extra + "\n" + circle; }

std::string error_key(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<no error>";
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
}

int call_main(std::vector<std::string> args) {
    args.insert(args.begin(), "wittenlab");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::main(static_cast<int>(argv.size()), argv.data());
}

} // namespace

TEST_CASE("config errors name the offending key") {
    CHECK(error_key(circle) == "<no error>");
    std::string seven = circle;
    seven.replace(seven.find("= 32"), 4, "= 7");
    CHECK(error_key(seven) == "grid.points_per_axis");
    CHECK(error_key(with("colour = blue")) == "colour");
    CHECK(error_key(with("checks = bochner, telepathy")) == "checks");
    CHECK(error_key(circle + "[flow]\nm = 0.5\n") == "flow.m");
    CHECK(error_key(circle + "[time]\ncount = 3\n") == "time.count");
    CHECK(error_key("[grid]\npoints_per_axis = 32\n") == "grid.domain");
    CHECK(error_key(circle + "[potential]\nkind = quadratic\n") == "potential.kind");
    CHECK(error_key(circle + "[initial]\nsigma = x\n") == "initial.sigma");
}

TEST_CASE("m = inf and an explicit K are accepted; K defaults to the measured bound") {
    const auto c = parse_config_text(circle + "[flow]\nm = inf\nK = 0\n");
    CHECK(c.m.is_infinite());
    REQUIRE(c.K);
    CHECK(*c.K == 0.0);
    const auto measured = parse_config_text(circle + "[potential]\nkind = trig\nterms = 0.5:1:0\n");
    CHECK_FALSE(measured.K);
    CHECK(measured.scenario().K() == doctest::Approx(-0.5).epsilon(1e-2));
}

TEST_CASE("a run without checks emits curves and passes") {
    const auto report = run(parse_config_text(circle));
    CHECK(report.pass);
    CHECK(report.json["checks"].empty());
    REQUIRE_FALSE(report.curves.empty());
    CHECK(report.curves[0].name == "entropy");
    CHECK(report.curves[0].rows.size() == 8); // t = 0 has no entropy coefficients
    CHECK(report.json["verdict"] == "pass");
    CHECK(report.json["provenance"]["config_sha256"].get<std::string>().size() == 64);
    CHECK_FALSE(report.json["provenance"].contains("wall_time_s"));
}

TEST_CASE("runs are deterministic and the seed option overrides the family seed") {
    const auto c = parse_config_text(with("checks = log-sobolev, poincare"));
    const auto a = run(c), b = run(c);
    CHECK(a.json.dump() == b.json.dump());
    RunOptions o;
    o.seed = 99;
    const auto seeded = run(c, o);
    CHECK(seeded.json["provenance"]["seed"] == 99);
}

TEST_CASE("the contrapositive check detects a false curvature bound") {
    std::string text = circle + "[potential]\nkind = trig\nterms = 0.5:1:0\n[flow]\nK = 0\n[family]\ncount = 6\n";
    text.replace(text.find("= 32"), 4, "= 128");
    auto c = parse_config_text(text);
    c.checks = {"contrapositive"};
    const auto r = run(c);
    REQUIRE(r.json["checks"].size() == 1);
    CHECK(r.json["checks"][0]["detected"] == true);
    CHECK(r.pass);
}

TEST_CASE("convergence study preconditions and exact rows") {
    auto c = parse_config_text(with("checks = operator-identities, bochner"));
    CHECK_THROWS_AS(convergence_study(c, 2), PreconditionError);
    c.checks = {"psi-monotonicity"};
    CHECK_THROWS_AS(convergence_study(c, 3), ConfigError);

    c.checks = {"operator-identities", "bochner"};
    const auto s = convergence_study(c, 3);
    REQUIRE(s.json["convergence"].size() == 2);
    CHECK(s.json["convergence"][0]["status"] == "exact");
    CHECK(s.json["convergence"][1]["status"] == "converged");
    CHECK(s.json["convergence"][1]["order"].get<double>() == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("fitted order recovers a power law") {
    const std::vector<double> h{0.1, 0.05, 0.025, 0.0125};
    std::vector<double> r;
    for (double x : h) r.push_back(3.0 * x * x);
    CHECK(fitted_order(h, r) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("reports are written completely and without temporary files") {
    const auto dir = std::filesystem::temp_directory_path() / "wittenlab-test-report";
    std::filesystem::remove_all(dir);
    const auto report = run(parse_config_text(circle));
    write_report(report, dir);
    CHECK(nlohmann::json::parse(slurp(dir / "report.json"))["verdict"] == "pass");
    const std::string csv = slurp(dir / "entropy.csv");
    CHECK(csv.rfind("t,H_K,dH,d2H,W_K,dW,rhs,fisher,hessian_integral\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
    for (const auto& e : std::filesystem::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
    std::filesystem::remove_all(dir);
}

TEST_CASE("command line exit codes") {
    const auto dir = std::filesystem::temp_directory_path() / "wittenlab-test-cli";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "ok.conf") << circle;
        std::ofstream(dir / "bad.conf") << with("colour = blue");
    }
    const std::string out = (dir / "out").string();
    CHECK(call_main({"list-catalog"}) == 0);
    CHECK(call_main({"run", (dir / "ok.conf").string(), "--out", out, "--quiet"}) == 0);
    CHECK(std::filesystem::exists(dir / "out" / "report.json"));
    CHECK(call_main({"run", (dir / "bad.conf").string(), "--out", out, "--quiet"}) == 2);
    CHECK(call_main({"run", (dir / "missing.conf").string(), "--out", out, "--quiet"}) == 2);
    CHECK(call_main({"study", (dir / "ok.conf").string(), "--levels", "2", "--out", out, "--quiet"}) == 2);
    CHECK(call_main({"frobnicate"}) == 2);
    std::filesystem::remove_all(dir);
}
