#include "wittenlab/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace wlab {

FamilyKind parse_family_kind(const std::string& name) {
    if (name == "random-trig") return FamilyKind::random_trig;
    if (name == "gaussian-bumps") return FamilyKind::gaussian_bumps;
    if (name == "near-eigen") return FamilyKind::near_eigen;
    throw PreconditionError("unknown test family '" + name +
                            "' (expected random-trig, gaussian-bumps or near-eigen)");
}

std::string family_kind_name(FamilyKind kind) {
    switch (kind) {
    case FamilyKind::random_trig: return "random-trig";
    case FamilyKind::gaussian_bumps: return "gaussian-bumps";
    case FamilyKind::near_eigen: return "near-eigen";
    }
    return "?";
}

ResidualMinimum residual_minimum(const FlowScenario& scenario, double s) {
    const GridSpec& grid = scenario.grid();
    const int n = grid.dimension();
    const SymTensorField T = super_flow_tensor(scenario, s, ModelDimension::infinite());
    ResidualMinimum best;
    best.value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.wall_distance(i) < 2) continue;
        const double g = scenario.factor(s, grid.node(i));
        Sym2 r = T[i];
        r.xx -= scenario.K() * g;
        r.yy -= scenario.K() * g;
        // compare eigenvalues of the mixed tensor g^{-1} r
        const double lam = min_eigenvalue(r, n) / g;
        if (lam < best.value) {
            best.value = lam;
            best.node = i;
            if (n == 1) {
                best.direction = {1.0, 0.0};
                continue;
            }
            const double l = lam * g;
            std::array<double, 2> a{r.xy, l - r.xx};
            std::array<double, 2> b{l - r.yy, r.xy};
            auto& v = std::hypot(a[0], a[1]) >= std::hypot(b[0], b[1]) ? a : b;
            const double norm = std::hypot(v[0], v[1]);
            best.direction = norm > 0.0 ? std::array<double, 2>{v[0] / norm, v[1] / norm}
                                        : std::array<double, 2>{r.xx <= r.yy ? 1.0 : 0.0,
                                                                r.xx <= r.yy ? 0.0 : 1.0};
        }
    }
    return best;
}

namespace {

// Phase along one axis: x on the torus, pi (x + R) / (2R) on a box, so cos(k .)
// has zero normal derivative at the walls.
double axis_phase(const GridSpec& grid, double x) {
    if (grid.periodic()) return x;
    return std::numbers::pi * (x + grid.half_width()) / grid.length();
}

std::vector<Field> random_trig(const TestFamily& fam, const GridSpec& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> shrink(0.3, 1.0);
    const int n = grid.dimension();
    const int kmax = grid.periodic() ? 3 : 6;
    std::vector<std::array<int, 2>> modes;
    for (int k1 = 0; k1 <= kmax; ++k1)
        for (int k2 = (n == 2 ? -kmax : 0); k2 <= (n == 2 ? kmax : 0); ++k2) {
            if (k1 == 0 && k2 <= 0) continue;
            if (!grid.periodic() && k2 < 0) continue;
            if (std::abs(k1) + std::abs(k2) > kmax) continue;
            modes.push_back({k1, k2});
        }
    const double cap = std::min(1.0, std::log(1.0 / fam.floor));
    std::vector<Field> out;
    for (int f = 0; f < fam.count; ++f) {
        std::vector<double> coeff(modes.size()), phase(modes.size());
        for (std::size_t m = 0; m < modes.size(); ++m) {
            coeff[m] = unit(rng) / (std::abs(modes[m][0]) + std::abs(modes[m][1]));
            phase[m] = grid.periodic() ? std::numbers::pi * unit(rng) : 0.0;
        }
        Field g = sample(grid, [&](Point p) {
            double acc = 0.0;
            const double a = axis_phase(grid, p[0]);
            const double b = n == 2 ? axis_phase(grid, p[1]) : 0.0;
            for (std::size_t m = 0; m < modes.size(); ++m) {
                const auto [k1, k2] = modes[m];
                acc += coeff[m] * (grid.periodic() ? std::cos(k1 * a + k2 * b + phase[m])
                                                   : std::cos(k1 * a) * std::cos(k2 * b));
            }
            return acc;
        });
        double peak = 0.0;
        for (double v : g) peak = std::max(peak, std::abs(v));
        const double scale = peak > 0.0 ? cap * shrink(rng) / peak : 0.0;
        for (double& v : g) v = std::exp(scale * v);
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<Field> gaussian_bumps(const TestFamily& fam, const GridSpec& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> height(0.5, 2.0), width(0.4, 1.2), unit(0.0, 1.0);
    const int n = grid.dimension();
    const double base = std::max(0.2, 2.0 * fam.floor);
    const double spread = grid.periodic() ? 2.0 * std::numbers::pi : 0.6 * grid.half_width();
    std::vector<Field> out;
    for (int f = 0; f < fam.count; ++f) {
        struct Bump { double b, w; Point c; };
        std::vector<Bump> bumps(3);
        for (auto& bp : bumps) {
            bp.b = height(rng);
            bp.w = width(rng);
            for (int k = 0; k < 2; ++k)
                bp.c[static_cast<std::size_t>(k)] =
                    grid.periodic() ? spread * unit(rng) : spread * (2.0 * unit(rng) - 1.0);
        }
        out.push_back(sample(grid, [&](Point p) {
            double acc = base;
            for (const auto& bp : bumps) {
                double e = 0.0;
                for (int k = 0; k < n; ++k) {
                    const double d = p[static_cast<std::size_t>(k)] - bp.c[static_cast<std::size_t>(k)];
                    e += grid.periodic() ? (std::cos(d) - 1.0) / (bp.w * bp.w) : -0.5 * d * d / (bp.w * bp.w);
                }
                acc += bp.b * std::exp(e);
            }
            return acc;
        }));
    }
    return out;
}

std::vector<Field> near_eigen(const TestFamily& fam, const FlowScenario& scenario, double s,
                              std::mt19937_64& rng) {
    const GridSpec& grid = scenario.grid();
    const int n = grid.dimension();
    const ResidualMinimum rm = residual_minimum(scenario, s);
    const Point x0 = grid.node(rm.node);
    std::uniform_real_distribution<double> width(0.5, 1.5);
    std::vector<Field> out;
    for (int f = 0; f < fam.count; ++f) {
        const double w = width(rng);
        const double sign = f % 2 == 0 ? 1.0 : -1.0;
        out.push_back(sample(grid, [&](Point p) {
            // v = (e . sin(x - x0)) * bump: grad v(x0) = e, Hess v(x0) = 0
            double lin = 0.0, e = 0.0;
            for (int k = 0; k < n; ++k) {
                const auto kk = static_cast<std::size_t>(k);
                const double d = p[kk] - x0[kk];
                lin += rm.direction[kk] * std::sin(d);
                e += grid.periodic() ? (std::cos(d) - 1.0) / (w * w) : -0.5 * d * d / (w * w);
            }
            return 1.0 + sign * fam.epsilon * lin * std::exp(e);
        }));
    }
    return out;
}

} // namespace

std::vector<Field> generate_family(const TestFamily& fam, const FlowScenario& scenario, double s) {
    if (fam.count < 1) throw PreconditionError("family.count must be >= 1");
    if (!(fam.floor > 0.0 && fam.floor < 1.0)) throw PreconditionError("family.floor must lie in (0, 1)");
    if (!(fam.epsilon > 0.0 && fam.epsilon < 0.5)) throw PreconditionError("family.epsilon must lie in (0, 0.5)");
    std::mt19937_64 rng(fam.seed);
    std::vector<Field> out;
    switch (fam.kind) {
    case FamilyKind::random_trig: out = random_trig(fam, scenario.grid(), rng); break;
    case FamilyKind::gaussian_bumps: out = gaussian_bumps(fam, scenario.grid(), rng); break;
    case FamilyKind::near_eigen: out = near_eigen(fam, scenario, s, rng); break;
    }
    for (const Field& f : out)
        for (double v : f)
            if (!(v >= fam.floor && v <= 1.0 / fam.floor))
                throw PreconditionError("generated test function leaves [floor, 1/floor]");
    return out;
}

} // namespace wlab
