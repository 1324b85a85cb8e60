#include "wittenlab/oracle.hpp"

#include <cmath>
#include <numbers>

namespace wlab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void require_time(double t) {
    if (!(t > 0.0)) throw PreconditionError("kernel time must be positive, got " + std::to_string(t));
}

double base_coordinate(const OUParams& p, int k) {
    return p.x.empty() ? 0.0 : p.x[static_cast<std::size_t>(k)];
}

} // namespace

void OUParams::validate() const {
    if (m < 1) throw PreconditionError("OU dimension m must be >= 1");
    if (!x.empty() && x.size() != static_cast<std::size_t>(m))
        throw PreconditionError("OU base point must have m coordinates");
    if (!std::isfinite(K)) throw PreconditionError("OU rate K must be finite");
}

double ou_variance(double K, double t) {
    if (K == 0.0) return 2.0 * t;
    return std::expm1(2.0 * K * t) / K;
}

double ou_kernel(const OUParams& p, std::span<const double> y, double t) {
    p.validate();
    require_time(t);
    if (y.size() != static_cast<std::size_t>(p.m)) throw PreconditionError("y must have m coordinates");
    const double v = ou_variance(p.K, t);
    const double shift = std::exp(p.K * t);
    double r2 = 0.0;
    for (int k = 0; k < p.m; ++k) {
        const double d = y[static_cast<std::size_t>(k)] - shift * base_coordinate(p, k);
        r2 += d * d;
    }
    return std::pow(two_pi * v, -0.5 * p.m) * std::exp(-0.5 * r2 / v);
}

double ou_kernel_entropy(const OUParams& p, double t) {
    p.validate();
    require_time(t);
    return -0.5 * p.m * (1.0 + std::log(two_pi * ou_variance(p.K, t)));
}

EntropyExpansion ou_entropy_expansion(const OUParams& p, double t) {
    const double exact = ou_kernel_entropy(p, t);
    EntropyExpansion e;
    e.value = -0.5 * p.m *
              (1.0 + std::log(4.0 * std::numbers::pi * t) + p.K * t + p.K * p.K * t * t / 6.0);
    e.remainder = exact - e.value;
    return e;
}

double euclid_kernel(int n, std::span<const double> x, std::span<const double> y, double t) {
    require_time(t);
    if (n < 1 || x.size() != static_cast<std::size_t>(n) || y.size() != static_cast<std::size_t>(n))
        throw PreconditionError("euclid_kernel needs two points of dimension n >= 1");
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double d = x[static_cast<std::size_t>(k)] - y[static_cast<std::size_t>(k)];
        r2 += d * d;
    }
    return std::pow(4.0 * std::numbers::pi * t, -0.5 * n) * std::exp(-r2 / (4.0 * t));
}

GaussianField::GaussianField(Eigen::VectorXd mean, Eigen::MatrixXd covariance, double prefactor)
    : mean_(std::move(mean)), covariance_(std::move(covariance)), prefactor_(prefactor) {
    if (covariance_.rows() != mean_.size() || covariance_.cols() != mean_.size())
        throw PreconditionError("Gaussian covariance shape does not match the mean");
    if ((covariance_ - covariance_.transpose()).norm() > 1e-12 * (1.0 + covariance_.norm()))
        throw PreconditionError("Gaussian covariance must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
    if (llt.info() != Eigen::Success)
        throw PreconditionError("Gaussian covariance must be positive definite");
}

GaussianField GaussianField::constant(int m, double value) {
    GaussianField g;
    g.mean_ = Eigen::VectorXd::Zero(m);
    g.covariance_ = Eigen::MatrixXd::Identity(m, m);
    g.prefactor_ = value;
    g.constant_ = true;
    return g;
}

double GaussianField::operator()(std::span<const double> y) const {
    if (constant_) return prefactor_;
    const Eigen::Map<const Eigen::VectorXd> point(y.data(), static_cast<Eigen::Index>(y.size()));
    const Eigen::VectorXd d = point - mean_;
    return prefactor_ * std::exp(-0.5 * d.dot(covariance_.ldlt().solve(d)));
}

Field GaussianField::sample(const GridSpec& grid) const {
    if (grid.dimension() != dimension())
        throw PreconditionError("Gaussian field dimension does not match the grid");
    const Eigen::MatrixXd precision = covariance_.inverse();
    return wlab::sample(grid, [&](Point p) {
        if (constant_) return prefactor_;
        Eigen::VectorXd d(dimension());
        for (int k = 0; k < dimension(); ++k) d[k] = p[static_cast<std::size_t>(k)] - mean_[k];
        return prefactor_ * std::exp(-0.5 * d.dot(precision * d));
    });
}

GaussianField mehler_propagate(const GaussianField& field, const OUParams& params, double s,
                               double t) {
    params.validate();
    if (params.m != field.dimension())
        throw PreconditionError("OU dimension does not match the Gaussian field");
    if (t < s) throw PreconditionError("mehler_propagate runs forward: need s <= t");
    if (field.is_constant() || t == s) return field;
    const double tau = t - s;
    const double v = ou_variance(params.K, tau);
    const Eigen::MatrixXd& S = field.covariance();
    const Eigen::MatrixXd widened = S + v * Eigen::MatrixXd::Identity(params.m, params.m);
    Eigen::LLT<Eigen::MatrixXd> a(S), b(widened);
    if (a.info() != Eigen::Success || b.info() != Eigen::Success)
        throw PreconditionError("covariance degenerated during propagation");
    // sqrt(det S / det(S + v I)) from the Cholesky diagonals
    double log_ratio = 0.0;
    for (int k = 0; k < params.m; ++k)
        log_ratio += std::log(a.matrixL()(k, k)) - std::log(b.matrixL()(k, k));
    const double contract = std::exp(-params.K * tau);
    return GaussianField(contract * field.mean(), contract * contract * widened,
                         field.prefactor() * std::exp(log_ratio));
}

} // namespace wlab
