#include "wittenlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wlab {

GridSpec::GridSpec(DomainKind kind, int dimension, int points, double half_width)
    : kind_(kind), dimension_(dimension), points_(points), half_width_(half_width),
      spacing_(2.0 * half_width / points) {
    if (dimension != 1 && dimension != 2)
        throw PreconditionError("grid.dimension must be 1 or 2, got " + std::to_string(dimension));
    if (points < 8)
        throw PreconditionError("grid.points_per_axis must be >= 8, got " + std::to_string(points));
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw PreconditionError("grid.half_width must be positive and finite");
}

GridSpec GridSpec::torus(int dimension, int points_per_axis) {
    return GridSpec(DomainKind::periodic_torus, dimension, points_per_axis, std::numbers::pi);
}

GridSpec GridSpec::box(int dimension, int points_per_axis, double half_width) {
    return GridSpec(DomainKind::euclidean_box, dimension, points_per_axis, half_width);
}

std::size_t GridSpec::size() const noexcept {
    return dimension_ == 1 ? static_cast<std::size_t>(points_)
                           : static_cast<std::size_t>(points_) * static_cast<std::size_t>(points_);
}

double GridSpec::cell_volume() const noexcept {
    return dimension_ == 1 ? spacing_ : spacing_ * spacing_;
}

double GridSpec::coordinate(int i) const noexcept {
    if (periodic()) return i * spacing_;
    return -half_width_ + (i + 0.5) * spacing_;
}

Point GridSpec::node(std::size_t index) const noexcept {
    const auto n = static_cast<std::size_t>(points_);
    if (dimension_ == 1) return {coordinate(static_cast<int>(index)), 0.0};
    return {coordinate(static_cast<int>(index % n)), coordinate(static_cast<int>(index / n))};
}

std::size_t GridSpec::index(int i, int j) const noexcept {
    if (periodic()) {
        i = ((i % points_) + points_) % points_;
        j = ((j % points_) + points_) % points_;
    }
    if (dimension_ == 1) return static_cast<std::size_t>(i);
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(points_) +
           static_cast<std::size_t>(i);
}

int GridSpec::axis_index(std::size_t index, int axis) const noexcept {
    const auto n = static_cast<std::size_t>(points_);
    if (axis == 0) return static_cast<int>(index % n);
    return static_cast<int>(index / n);
}

std::size_t GridSpec::nearest_node(Point p) const noexcept {
    auto axis = [&](double x) {
        double s = periodic() ? x / spacing_ : (x + half_width_) / spacing_ - 0.5;
        int i = static_cast<int>(std::lround(s));
        if (periodic()) return ((i % points_) + points_) % points_;
        return std::clamp(i, 0, points_ - 1);
    };
    return dimension_ == 1 ? index(axis(p[0])) : index(axis(p[0]), axis(p[1]));
}

int GridSpec::wall_distance(std::size_t idx) const noexcept {
    if (periodic()) return points_;
    int best = points_;
    for (int axis = 0; axis < dimension_; ++axis) {
        const int i = axis_index(idx, axis);
        best = std::min({best, i, points_ - 1 - i});
    }
    return best;
}

GridSpec GridSpec::refined(int factor) const {
    return GridSpec(kind_, dimension_, points_ * factor, half_width_);
}

std::vector<double> uniform_times(double start, double end, int count) {
    if (count < 2) throw PreconditionError("time grid needs at least two points");
    std::vector<double> t(static_cast<std::size_t>(count));
    const double step = (end - start) / (count - 1);
    for (int k = 0; k < count; ++k) t[static_cast<std::size_t>(k)] = start + k * step;
    t.back() = end;
    return t;
}

double WeightedMeasure::total() const noexcept {
    double acc = 0.0;
    for (double w : weights) acc += w;
    return acc;
}

double min_eigenvalue(const Sym2& s, int dimension) noexcept {
    if (dimension == 1) return s.xx;
    const double mean = 0.5 * (s.xx + s.yy);
    const double half_diff = 0.5 * (s.xx - s.yy);
    return mean - std::hypot(half_diff, s.xy);
}

double max_eigenvalue(const Sym2& s, int dimension) noexcept {
    if (dimension == 1) return s.xx;
    const double mean = 0.5 * (s.xx + s.yy);
    const double half_diff = 0.5 * (s.xx - s.yy);
    return mean + std::hypot(half_diff, s.xy);
}

Field SymTensorField::min_eigenvalues() const {
    Field out(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = min_eigenvalue(data_[i], dimension_);
    return out;
}

double SymTensorField::max_abs() const noexcept {
    double m = 0.0;
    for (const auto& s : data_) {
        m = std::max(m, std::abs(s.xx));
        if (dimension_ == 2) m = std::max({m, std::abs(s.xy), std::abs(s.yy)});
    }
    return m;
}

double ModelDimension::value() const {
    if (infinite_) throw PreconditionError("model dimension m is infinite");
    return value_;
}

std::string ModelDimension::str() const {
    if (infinite_) return "inf";
    std::string s = std::to_string(value_);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

} // namespace wlab
