#include "wittenlab/operators.hpp"
#include "wittenlab/kernels.hpp"

#include <cmath>

namespace wlab {

WittenOperator::WittenOperator(const FlowScenario& scenario, double t)
    : grid_(scenario.grid()), time_(t), measure_(measure_weights(scenario, t)) {
    const int n = grid_.dimension();
    const int N = grid_.points_per_axis();
    const double h = grid_.spacing();
    const double h_pow = n == 1 ? 1.0 / h : 1.0;
    const std::size_t size = grid_.size();

    for (int axis = 0; axis < n; ++axis) {
        Field& link = link_[static_cast<std::size_t>(axis)];
        link.assign(size, 0.0);
        for (std::size_t i = 0; i < size; ++i) {
            if (!grid_.periodic() && grid_.axis_index(i, axis) == N - 1) continue;
            Point mid = grid_.node(i);
            mid[static_cast<std::size_t>(axis)] += 0.5 * h;
            // e^{-phi} g^{11} sqrt(det g) = exp(-phi + (n - 2) a)
            const double expo = -scenario.phi(t, mid) + (n - 2) * scenario.log_factor(t, mid);
            link[i] = std::exp(expo) * h_pow;
        }
    }

    const Field& mu = measure_.weights;
    east_.assign(size, 0.0);
    west_.assign(size, 0.0);
    if (n == 2) {
        north_.assign(size, 0.0);
        south_.assign(size, 0.0);
    }
    for (std::size_t i = 0; i < size; ++i) {
        const int ix = grid_.axis_index(i, 0);
        east_[i] = link_[0][i] / mu[i];
        if (grid_.periodic() || ix > 0) {
            const std::size_t w = n == 1 ? grid_.index(ix - 1) : grid_.index(ix - 1, grid_.axis_index(i, 1));
            west_[i] = link_[0][w] / mu[i];
        }
        if (n == 2) {
            const int iy = grid_.axis_index(i, 1);
            north_[i] = link_[1][i] / mu[i];
            if (grid_.periodic() || iy > 0) south_[i] = link_[1][grid_.index(ix, iy - 1)] / mu[i];
        }
    }
}

void WittenOperator::apply(std::span<const double> u, std::span<double> out) const {
    if (u.size() != size() || out.size() != size())
        throw PreconditionError("field size does not match the operator");
    kernels::StencilView view;
    view.nx = static_cast<std::size_t>(grid_.points_per_axis());
    view.ny = grid_.dimension() == 2 ? view.nx : 1;
    view.periodic = grid_.periodic();
    view.east = east_;
    view.west = west_;
    view.north = north_;
    view.south = south_;
    kernels::stencil_apply(view, u, out);
}

Field WittenOperator::apply(std::span<const double> u) const {
    Field out(size());
    apply(u, out);
    return out;
}

double WittenOperator::inner(std::span<const double> u, std::span<const double> v) const {
    return kernels::weighted_dot(measure_.weights, u, v);
}

double WittenOperator::dirichlet(std::span<const double> u, std::span<const double> v) const {
    const int n = grid_.dimension();
    double acc = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        const int ix = grid_.axis_index(i, 0);
        const int iy = n == 2 ? grid_.axis_index(i, 1) : 0;
        for (int axis = 0; axis < n; ++axis) {
            const double k = link_[static_cast<std::size_t>(axis)][i];
            if (k == 0.0) continue;
            const std::size_t j = axis == 0 ? (n == 1 ? grid_.index(ix + 1) : grid_.index(ix + 1, iy))
                                            : grid_.index(ix, iy + 1);
            acc += k * (u[j] - u[i]) * (v[j] - v[i]);
        }
    }
    return acc;
}

Field WittenOperator::carre_du_champ(std::span<const double> u) const {
    Field sq(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) sq[i] = u[i] * u[i];
    Field out = apply(sq);
    const Field lu = apply(u);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = 0.5 * out[i] - u[i] * lu[i];
    return out;
}

namespace {

Eigen::SparseMatrix<double> assemble(const GridSpec& grid, const std::array<Field, 2>& link,
                                     const Field& diag, double scale) {
    const int n = grid.dimension();
    const auto size = static_cast<Eigen::Index>(grid.size());
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(grid.size() * (1 + 2 * static_cast<std::size_t>(n)));
    Field row_sum(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const int ix = grid.axis_index(i, 0);
        const int iy = n == 2 ? grid.axis_index(i, 1) : 0;
        for (int axis = 0; axis < n; ++axis) {
            const double k = link[static_cast<std::size_t>(axis)][i];
            if (k == 0.0) continue;
            const std::size_t j = axis == 0 ? (n == 1 ? grid.index(ix + 1) : grid.index(ix + 1, iy))
                                            : grid.index(ix, iy + 1);
            const auto a = static_cast<Eigen::Index>(i);
            const auto b = static_cast<Eigen::Index>(j);
            entries.emplace_back(a, b, scale * k);
            entries.emplace_back(b, a, scale * k);
            row_sum[i] += k;
            row_sum[j] += k;
        }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto a = static_cast<Eigen::Index>(i);
        entries.emplace_back(a, a, diag[i] - scale * row_sum[i]);
    }
    Eigen::SparseMatrix<double> m(size, size);
    m.setFromTriplets(entries.begin(), entries.end());
    return m;
}

} // namespace

Eigen::SparseMatrix<double> WittenOperator::stiffness() const {
    return assemble(grid_, link_, Field(size(), 0.0), 1.0);
}

Eigen::SparseMatrix<double> WittenOperator::implicit_matrix(double theta_dt) const {
    return assemble(grid_, link_, measure_.weights, -theta_dt);
}

} // namespace wlab
