#pragma once

#include <optional>
#include <span>
#include <vector>

#include "circmodal/kernels.hpp"
#include "circmodal/sample.hpp"

namespace circmodal {

/// Predictor-marginal threshold below which the conditional density is
/// declared undefined rather than formed as an unstable ratio.
inline constexpr double kLowSupportThreshold = 1e-10;

/// Kernel estimator of the conditional density of the response given the
/// predictor, for any of the three geometries. Immutable after
/// construction; evaluations are pure and may run concurrently.
///
/// The response-direction derivatives are closed forms of the kernel
/// sums, not numerical differences.
class ConditionalDensityEstimate {
public:
    ConditionalDensityEstimate(RegressionSample sample, Bandwidths bandwidths);

    const RegressionSample& sample() const { return sample_; }
    const Bandwidths& bandwidths() const { return bandwidths_; }
    Geometry geometry() const { return sample_.geometry; }
    std::size_t size() const { return sample_.size(); }

    /// Kernel density estimate of the predictor marginal at delta.
    double predictor_marginal(double delta) const;

    /// Conditional density of the response at r given the predictor at
    /// delta. Throws low_support_error when the marginal at delta falls
    /// below kLowSupportThreshold.
    double conditional(double delta, double r) const;

    /// First or second partial derivative of the conditional density in
    /// the response coordinate.
    double conditional_derivative(double delta, double r, int order) const;

    // ---- hot-path surface used by the mean-shift engines ----

    /// Fills out[j] = log w_delta(Delta_j), the exact log predictor
    /// weight of observation j (normalization constants included).
    void predictor_log_weights(double delta, std::span<double> out) const;

    double marginal_from_log_weights(std::span<const double> lw) const;
    double conditional_from_log_weights(std::span<const double> lw, double r) const;
    double conditional_derivative_from_log_weights(std::span<const double> lw,
                                                   double r, int order) const;

    std::span<const double> predictors() const { return sample_.predictors; }
    std::span<const double> responses() const { return sample_.responses; }

    /// Cached sin/cos of circular responses (empty spans otherwise).
    std::span<const double> response_sin() const { return response_sin_; }
    std::span<const double> response_cos() const { return response_cos_; }

    const LinearKernel* linear_response_kernel() const {
        return resp_lin_ ? &*resp_lin_ : nullptr;
    }
    const CircularKernel* circular_response_kernel() const {
        return resp_circ_ ? &*resp_circ_ : nullptr;
    }
    const LinearKernel* linear_predictor_kernel() const {
        return pred_lin_ ? &*pred_lin_ : nullptr;
    }
    const CircularKernel* circular_predictor_kernel() const {
        return pred_circ_ ? &*pred_circ_ : nullptr;
    }

private:
    struct WeightedSums;
    WeightedSums weighted_sums(std::span<const double> lw, double r, int order) const;

    RegressionSample sample_;
    Bandwidths bandwidths_;
    std::optional<LinearKernel> pred_lin_;
    std::optional<CircularKernel> pred_circ_;
    std::optional<LinearKernel> resp_lin_;
    std::optional<CircularKernel> resp_circ_;
    std::vector<double> predictor_sin_, predictor_cos_;
    std::vector<double> response_sin_, response_cos_;
};

}  // namespace circmodal
