#include "wittenlab/entropy.hpp"

#include <cmath>

namespace wlab {

EntropyCoefficients::EntropyCoefficients(double K, CoefficientBranch branch)
    : K_(K), branch_(branch) {
    if (!std::isfinite(K)) throw PreconditionError("K must be finite");
}

bool EntropyCoefficients::uses_series(double t) const noexcept {
    if (K_ == 0.0) return true;
    switch (branch_) {
    case CoefficientBranch::series: return true;
    case CoefficientBranch::closed_form: return false;
    case CoefficientBranch::automatic: return std::abs(K_ * t) < series_threshold;
    }
    return true;
}

namespace {

void require_positive(double t) {
    if (!(t > 0.0)) throw PreconditionError("entropy coefficients need t > 0");
}

} // namespace

double EntropyCoefficients::C(double t) const {
    require_positive(t);
    if (uses_series(t)) {
        const double x = 2.0 * K_ * t;
        return (1.0 - x / 2.0 + x * x / 12.0) / t;
    }
    return 2.0 * K_ / std::expm1(2.0 * K_ * t);
}

double EntropyCoefficients::D(double t) const {
    require_positive(t);
    if (uses_series(t)) {
        const double x = 2.0 * K_ * t;
        return (1.0 + x / 2.0 + x * x / 12.0) / t;
    }
    return -2.0 * K_ / std::expm1(-2.0 * K_ * t);
}

double EntropyCoefficients::beta(double t) const {
    if (uses_series(t)) {
        const double x = 2.0 * K_ * t;
        return t * (1.0 + x * x / 6.0);
    }
    return std::sinh(2.0 * K_ * t) / (2.0 * K_);
}

double EntropyCoefficients::alpha(double t) const {
    if (uses_series(t)) {
        const double y = K_ * t;
        return K_ * y * (1.0 - y * y / 3.0);
    }
    return K_ * std::tanh(K_ * t);
}

double EntropyCoefficients::two_k_coth(double t) const {
    require_positive(t);
    if (uses_series(t)) {
        const double y = K_ * t;
        return 2.0 * (1.0 + y * y / 3.0) / t;
    }
    return 2.0 * K_ / std::tanh(K_ * t);
}

double EntropyCoefficients::dissipation_weight(double t) const {
    return 2.0 + std::expm1(2.0 * K_ * t);
}

} // namespace wlab
