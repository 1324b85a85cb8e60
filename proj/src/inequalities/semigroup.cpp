#include "wittenlab/entropy.hpp"
#include "wittenlab/inequalities.hpp"

#include <algorithm>
#include <cmath>

namespace wlab {

std::string inequality_id(SemigroupInequality which) {
    switch (which) {
    case SemigroupInequality::log_sobolev: return "log-sobolev";
    case SemigroupInequality::reversal_log_sobolev: return "reversal-log-sobolev";
    case SemigroupInequality::poincare: return "poincare";
    case SemigroupInequality::reversal_poincare: return "reversal-poincare";
    case SemigroupInequality::gradient_estimate: return "gradient-estimate";
    }
    return "?";
}

InequalityReport make_report(std::string id, std::vector<double> margins, double threshold) {
    InequalityReport r;
    r.id = std::move(id);
    r.threshold = threshold;
    if (!margins.empty()) {
        r.min_margin = *std::min_element(margins.begin(), margins.end());
        double sum = 0.0;
        for (double m : margins) sum += m;
        r.mean_margin = sum / static_cast<double>(margins.size());
    }
    r.pass = r.min_margin >= -threshold;
    r.margins = std::move(margins);
    return r;
}

namespace {

struct Needs {
    bool flogf = false;
    bool fisher_density = false;
    bool square = false;
    bool grad_sq = false;
    bool positive = false;
};

Needs needs_of(SemigroupInequality which) {
    Needs n;
    switch (which) {
    case SemigroupInequality::log_sobolev: n.flogf = n.fisher_density = n.positive = true; break;
    case SemigroupInequality::reversal_log_sobolev: n.flogf = n.positive = true; break;
    case SemigroupInequality::poincare: n.square = n.grad_sq = true; break;
    case SemigroupInequality::reversal_poincare: n.square = true; break;
    case SemigroupInequality::gradient_estimate: n.grad_sq = true; break;
    }
    return n;
}

Needs merge(Needs a, Needs b) {
    return {a.flogf || b.flogf, a.fisher_density || b.fisher_density, a.square || b.square,
            a.grad_sq || b.grad_sq, a.positive || b.positive};
}

struct Evolved {
    Field Pf, Pflogf, Pfisher, Psq, Pgrad;
};

void check_window(const FlowScenario& scenario, double s, double t) {
    if (!(s >= 0.0 && s < t && t <= scenario.final_time() + 1e-12))
        throw PreconditionError("inequality window needs 0 <= s < t <= T");
}

std::vector<Evolved> evolve_family(const FlowScenario& scenario, const HeatPropagator& P, double s,
                                   double t, const std::vector<Field>& family, Needs needs) {
    std::vector<Field> batch;
    for (const Field& f : family) {
        if (f.size() != scenario.grid().size())
            throw PreconditionError("test function size does not match the grid");
        if (needs.positive)
            for (double v : f)
                if (!(v > 0.0)) throw PositivityError("entropy inequalities need f > 0");
        batch.push_back(f);
        if (needs.flogf) {
            Field g(f.size());
            for (std::size_t i = 0; i < f.size(); ++i) g[i] = f[i] * std::log(f[i]);
            batch.push_back(std::move(g));
        }
        Field grad;
        if (needs.fisher_density || needs.grad_sq) grad = gradient_sq(f, scenario, s);
        if (needs.fisher_density) {
            Field g(f.size());
            for (std::size_t i = 0; i < f.size(); ++i) g[i] = grad[i] / f[i];
            batch.push_back(std::move(g));
        }
        if (needs.square) {
            Field g(f.size());
            for (std::size_t i = 0; i < f.size(); ++i) g[i] = f[i] * f[i];
            batch.push_back(std::move(g));
        }
        if (needs.grad_sq) batch.push_back(std::move(grad));
    }
    batch = P.evolve_batch(std::move(batch), s, t);
    std::vector<Evolved> out(family.size());
    std::size_t k = 0;
    for (auto& e : out) {
        e.Pf = std::move(batch[k++]);
        if (needs.flogf) e.Pflogf = std::move(batch[k++]);
        if (needs.fisher_density) e.Pfisher = std::move(batch[k++]);
        if (needs.square) e.Psq = std::move(batch[k++]);
        if (needs.grad_sq) e.Pgrad = std::move(batch[k++]);
    }
    return out;
}

// (1 - e^{-2K tau}) / (2K), tau at K = 0.
double lsi_coefficient(double K, double tau) {
    if (std::abs(K * tau) < EntropyCoefficients::series_threshold) {
        const double x = 2.0 * K * tau;
        return tau * (1.0 - x / 2.0 + x * x / 6.0);
    }
    return -std::expm1(-2.0 * K * tau) / (2.0 * K);
}

Field margin_field(SemigroupInequality which, const FlowScenario& scenario, double s, double t,
                   const Evolved& e) {
    const double tau = t - s;
    const double K = scenario.K();
    const Field grad = gradient_sq(e.Pf, scenario, t);
    const double c_lsi = lsi_coefficient(K, tau);
    const double c_rev = EntropyCoefficients(K).C(tau);
    const double decay = std::exp(-2.0 * K * tau);
    Field m(e.Pf.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double pf = e.Pf[i];
        switch (which) {
        case SemigroupInequality::log_sobolev:
            m[i] = c_lsi * e.Pfisher[i] - (e.Pflogf[i] - pf * std::log(pf));
            break;
        case SemigroupInequality::reversal_log_sobolev:
            m[i] = c_rev * (e.Pflogf[i] - pf * std::log(pf)) - grad[i] / pf;
            break;
        case SemigroupInequality::poincare:
            m[i] = 2.0 * c_lsi * e.Pgrad[i] - (e.Psq[i] - pf * pf);
            break;
        case SemigroupInequality::reversal_poincare:
            m[i] = 0.5 * c_rev * (e.Psq[i] - pf * pf) - grad[i];
            break;
        case SemigroupInequality::gradient_estimate:
            m[i] = decay * e.Pgrad[i] - grad[i];
            break;
        }
    }
    return m;
}

double min_over_nodes(const Field& m, const GridSpec& grid) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.size(); ++i)
        if (grid.wall_distance(i) >= 2) best = std::min(best, m[i]);
    return best;
}

constexpr SemigroupInequality all_inequalities[] = {
    SemigroupInequality::log_sobolev, SemigroupInequality::reversal_log_sobolev,
    SemigroupInequality::poincare, SemigroupInequality::reversal_poincare,
    SemigroupInequality::gradient_estimate};

} // namespace

double inequality_step(const FlowScenario& scenario, double s, double t) {
    const HeatPropagator probe(scenario);
    return std::min(probe.max_step(), (t - s) / 100.0);
}

Field inequality_margin_field(SemigroupInequality which, const FlowScenario& scenario,
                              const HeatPropagator& propagator, double s, double t, const Field& f) {
    check_window(scenario, s, t);
    const auto e = evolve_family(scenario, propagator, s, t, {f}, needs_of(which));
    return margin_field(which, scenario, s, t, e[0]);
}

InequalityReport inequality_check(SemigroupInequality which, const FlowScenario& scenario,
                                  const HeatPropagator& propagator, double s, double t,
                                  const std::vector<Field>& family, const Tolerance& tolerance) {
    check_window(scenario, s, t);
    const auto evolved = evolve_family(scenario, propagator, s, t, family, needs_of(which));
    std::vector<double> margins;
    for (const auto& e : evolved)
        margins.push_back(min_over_nodes(margin_field(which, scenario, s, t, e), scenario.grid()));
    return make_report(inequality_id(which), std::move(margins), tolerance.threshold(scenario.grid()));
}

std::vector<InequalityReport> theorem_suite(const FlowScenario& scenario,
                                            const HeatPropagator& propagator, double s, double t,
                                            const std::vector<Field>& family,
                                            const Tolerance& tolerance) {
    check_window(scenario, s, t);
    Needs all;
    for (auto w : all_inequalities) all = merge(all, needs_of(w));
    const auto evolved = evolve_family(scenario, propagator, s, t, family, all);
    std::vector<InequalityReport> out;
    for (auto w : all_inequalities) {
        std::vector<double> margins;
        for (const auto& e : evolved)
            margins.push_back(min_over_nodes(margin_field(w, scenario, s, t, e), scenario.grid()));
        out.push_back(make_report(inequality_id(w), std::move(margins),
                                  tolerance.threshold(scenario.grid())));
    }
    return out;
}

namespace {

InequalityReport single(SemigroupInequality which, const FlowScenario& scenario, double s, double t,
                        const std::vector<Field>& family, const Tolerance& tolerance) {
    const HeatPropagator P(scenario, inequality_step(scenario, s, t));
    return inequality_check(which, scenario, P, s, t, family, tolerance);
}

} // namespace

InequalityReport lsi_check(const FlowScenario& sc, double s, double t, const std::vector<Field>& fam,
                           const Tolerance& tol) {
    return single(SemigroupInequality::log_sobolev, sc, s, t, fam, tol);
}
InequalityReport rlsi_check(const FlowScenario& sc, double s, double t, const std::vector<Field>& fam,
                            const Tolerance& tol) {
    return single(SemigroupInequality::reversal_log_sobolev, sc, s, t, fam, tol);
}
InequalityReport poincare_check(const FlowScenario& sc, double s, double t,
                                const std::vector<Field>& fam, const Tolerance& tol) {
    return single(SemigroupInequality::poincare, sc, s, t, fam, tol);
}
InequalityReport rpoincare_check(const FlowScenario& sc, double s, double t,
                                 const std::vector<Field>& fam, const Tolerance& tol) {
    return single(SemigroupInequality::reversal_poincare, sc, s, t, fam, tol);
}
InequalityReport gradient_estimate_check(const FlowScenario& sc, double s, double t,
                                         const std::vector<Field>& fam, const Tolerance& tol) {
    return single(SemigroupInequality::gradient_estimate, sc, s, t, fam, tol);
}

ContrapositiveReport contrapositive_check(const FlowScenario& scenario, double s,
                                          const std::vector<double>& gaps, const TestFamily& family,
                                          const Tolerance& tolerance) {
    TestFamily fam = family;
    fam.kind = FamilyKind::near_eigen;
    const auto functions = generate_family(fam, scenario, s);
    ContrapositiveReport out;
    out.residual = residual_minimum(scenario, s);
    out.gaps = gaps;
    // f = 1 + eps v: the margin and its discretisation error are both O(eps^2)
    Tolerance scaled = tolerance;
    scaled.h2_allowance *= fam.epsilon * fam.epsilon;
    for (double gap : gaps) {
        const HeatPropagator P(scenario, std::min(gap, scenario.grid().spacing()) / 8.0);
        auto r = inequality_check(SemigroupInequality::gradient_estimate, scenario, P, s, s + gap,
                                  functions, scaled);
        if (r.min_margin < -r.threshold) out.detected = true;
        out.reports.push_back(std::move(r));
    }
    return out;
}

} // namespace wlab
