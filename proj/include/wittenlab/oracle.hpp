#pragma once

// Closed forms for the Ornstein-Uhlenbeck process dX = sqrt(2) dW + K X dt on
// R^m, whose generator is Delta + K x.grad, i.e. the Witten Laplacian with
// phi = -K |x|^2 / 2. The law of X_t started at x is N(e^{Kt} x, v(t) Id)
// with v(t) = (e^{2Kt} - 1) / K (v = 2t at K = 0).

#include "wittenlab/geometry.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace wlab {

struct OUParams {
    int m = 1;
    double K = 0.0;
    std::vector<double> x; // base point, size m (empty means the origin)

    void validate() const;
};

/// Variance v(t) = (e^{2Kt} - 1) / K of each coordinate of X_t; 2t at K = 0.
double ou_variance(double K, double t);

/// Density of X_t at y.
double ou_kernel(const OUParams& params, std::span<const double> y, double t);

/// int u log u dy for the kernel above: -(m/2)(1 + log(2 pi v(t))).
double ou_kernel_entropy(const OUParams& params, double t);

struct EntropyExpansion {
    double value = 0.0;     // -(m/2)(1 + log(4 pi t) + K t + K^2 t^2 / 6)
    double remainder = 0.0; // ou_kernel_entropy - value
};
EntropyExpansion ou_entropy_expansion(const OUParams& params, double t);

/// prefactor * exp(-(1/2)(y - mean)^T covariance^{-1} (y - mean)), or the
/// constant `prefactor` when `is_constant` is set.
class GaussianField {
public:
    GaussianField(Eigen::VectorXd mean, Eigen::MatrixXd covariance, double prefactor = 1.0);
    static GaussianField constant(int m, double value);

    int dimension() const noexcept { return static_cast<int>(mean_.size()); }
    bool is_constant() const noexcept { return constant_; }
    const Eigen::VectorXd& mean() const noexcept { return mean_; }
    const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
    double prefactor() const noexcept { return prefactor_; }

    double operator()(std::span<const double> y) const;
    /// Values at the grid nodes (the grid dimension must match).
    Field sample(const GridSpec& grid) const;

private:
    GaussianField() = default;

    Eigen::VectorXd mean_;
    Eigen::MatrixXd covariance_;
    double prefactor_ = 1.0;
    bool constant_ = false;
};

/// P_{s,t} applied to a Gaussian field (the semigroup is time-homogeneous, so
/// only t - s matters).
GaussianField mehler_propagate(const GaussianField& field, const OUParams& params, double s,
                               double t);

/// (4 pi t)^{-n/2} exp(-|x - y|^2 / (4t))
double euclid_kernel(int n, std::span<const double> x, std::span<const double> y, double t);

} // namespace wlab
