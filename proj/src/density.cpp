#include "circmodal/density.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "circmodal/errors.hpp"
#include "circmodal/kahan.hpp"

namespace circmodal {

namespace {
const double kLogSqrtTwoPi = 0.5 * std::log(kTwoPi);
// Terms this far below the leading exponent change the compensated sums
// by less than 1e-19 relative and are skipped.
constexpr double kNegligibleExponentGap = 50.0;
}

ConditionalDensityEstimate::ConditionalDensityEstimate(RegressionSample sample,
                                                       Bandwidths bandwidths)
    : sample_(std::move(sample)), bandwidths_(bandwidths) {
    if (predictor_is_circular(sample_.geometry)) {
        pred_circ_.emplace(bandwidths_.predictor);
        predictor_sin_.reserve(sample_.size());
        predictor_cos_.reserve(sample_.size());
        for (double p : sample_.predictors) {
            predictor_sin_.push_back(std::sin(p));
            predictor_cos_.push_back(std::cos(p));
        }
    } else {
        pred_lin_.emplace(bandwidths_.predictor);
    }
    if (response_is_circular(sample_.geometry)) {
        resp_circ_.emplace(bandwidths_.response);
        response_sin_.reserve(sample_.size());
        response_cos_.reserve(sample_.size());
        for (double r : sample_.responses) {
            response_sin_.push_back(std::sin(r));
            response_cos_.push_back(std::cos(r));
        }
    } else {
        resp_lin_.emplace(bandwidths_.response);
    }
}

void ConditionalDensityEstimate::predictor_log_weights(double delta,
                                                       std::span<double> out) const {
    const std::size_t n = sample_.size();
    if (out.size() != n) {
        throw std::invalid_argument("predictor_log_weights: output span has wrong size");
    }
    if (pred_circ_) {
        const double kappa = pred_circ_->concentration();
        const double log_norm = pred_circ_->log_normalization();
        const double cd = std::cos(delta);
        const double sd = std::sin(delta);
        for (std::size_t j = 0; j < n; ++j) {
            const double cos_diff = cd * predictor_cos_[j] + sd * predictor_sin_[j];
            out[j] = kappa * (cos_diff - 1.0) + log_norm;
        }
    } else {
        const double h = pred_lin_->bandwidth();
        const double log_norm = -std::log(h) - kLogSqrtTwoPi;
        for (std::size_t j = 0; j < n; ++j) {
            const double u = (delta - sample_.predictors[j]) / h;
            out[j] = -0.5 * u * u + log_norm;
        }
    }
}

double ConditionalDensityEstimate::marginal_from_log_weights(
    std::span<const double> lw) const {
    double m = -std::numeric_limits<double>::infinity();
    for (double e : lw) {
        if (e > m) m = e;
    }
    if (!std::isfinite(m)) {
        return 0.0;
    }
    KahanSum sum;
    for (double e : lw) {
        if (e - m >= -kNegligibleExponentGap) {
            sum.add(std::exp(e - m));
        }
    }
    return std::exp(m + std::log(sum.value() / static_cast<double>(lw.size())));
}

double ConditionalDensityEstimate::predictor_marginal(double delta) const {
    std::vector<double> lw(sample_.size());
    predictor_log_weights(delta, lw);
    return marginal_from_log_weights(lw);
}

struct ConditionalDensityEstimate::WeightedSums {
    double weight_sum;    // sum of shifted predictor weights
    double value_sum;     // sum of weight * response-kernel value
    double marginal;      // predictor marginal, true scale
};

// Accumulates the numerator for the conditional density (order 0) or its
// response-direction derivatives (order 1, 2) against the shared
// predictor-weight denominator.
ConditionalDensityEstimate::WeightedSums ConditionalDensityEstimate::weighted_sums(
    std::span<const double> lw, double r, int order) const {
    const std::size_t n = sample_.size();
    double m = -std::numeric_limits<double>::infinity();
    for (double e : lw) {
        if (e > m) m = e;
    }
    WeightedSums out{0.0, 0.0, 0.0};
    if (!std::isfinite(m)) {
        return out;
    }
    KahanSum den, num;
    if (resp_lin_) {
        const double h = resp_lin_->bandwidth();
        const double norm = 1.0 / (h * std::sqrt(kTwoPi));
        for (std::size_t j = 0; j < n; ++j) {
            if (lw[j] - m < -kNegligibleExponentGap) continue;
            const double w = std::exp(lw[j] - m);
            den.add(w);
            const double u = (r - sample_.responses[j]) / h;
            const double phi = norm * std::exp(-0.5 * u * u);
            double factor = phi;
            if (order == 1) {
                factor = -u * phi / h;
            } else if (order == 2) {
                factor = (u * u - 1.0) * phi / (h * h);
            }
            num.add(w * factor);
        }
    } else {
        const double kappa = resp_circ_->concentration();
        const double norm = resp_circ_->normalization();
        const double cr = std::cos(r);
        const double sr = std::sin(r);
        for (std::size_t j = 0; j < n; ++j) {
            if (lw[j] - m < -kNegligibleExponentGap) continue;
            const double w = std::exp(lw[j] - m);
            den.add(w);
            const double cos_diff = cr * response_cos_[j] + sr * response_sin_[j];
            const double sin_diff = sr * response_cos_[j] - cr * response_sin_[j];
            const double k = norm * std::exp(kappa * (cos_diff - 1.0));
            double factor = k;
            if (order == 1) {
                factor = -kappa * sin_diff * k;
            } else if (order == 2) {
                factor = kappa * (kappa * sin_diff * sin_diff - cos_diff) * k;
            }
            num.add(w * factor);
        }
    }
    out.weight_sum = den.value();
    out.value_sum = num.value();
    out.marginal = std::exp(m + std::log(den.value() / static_cast<double>(n)));
    return out;
}

double ConditionalDensityEstimate::conditional_from_log_weights(
    std::span<const double> lw, double r) const {
    const WeightedSums s = weighted_sums(lw, r, 0);
    if (!(s.marginal > kLowSupportThreshold)) {
        throw low_support_error(
            "conditional density undefined: predictor marginal " +
                std::to_string(s.marginal) + " below support threshold",
            r);
    }
    return s.value_sum / s.weight_sum;
}

double ConditionalDensityEstimate::conditional_derivative_from_log_weights(
    std::span<const double> lw, double r, int order) const {
    if (order != 1 && order != 2) {
        throw std::invalid_argument("conditional_derivative: order must be 1 or 2");
    }
    const WeightedSums s = weighted_sums(lw, r, order);
    if (!(s.marginal > kLowSupportThreshold)) {
        throw low_support_error(
            "conditional derivative undefined: predictor marginal below support threshold",
            r);
    }
    return s.value_sum / s.weight_sum;
}

double ConditionalDensityEstimate::conditional(double delta, double r) const {
    std::vector<double> lw(sample_.size());
    predictor_log_weights(delta, lw);
    const WeightedSums s = weighted_sums(lw, r, 0);
    if (!(s.marginal > kLowSupportThreshold)) {
        throw low_support_error(
            "conditional density undefined at predictor " + std::to_string(delta) +
                ": marginal below support threshold",
            delta);
    }
    return s.value_sum / s.weight_sum;
}

double ConditionalDensityEstimate::conditional_derivative(double delta, double r,
                                                          int order) const {
    std::vector<double> lw(sample_.size());
    predictor_log_weights(delta, lw);
    return conditional_derivative_from_log_weights(lw, r, order);
}

}  // namespace circmodal
