#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "circmodal/meanshift.hpp"
#include "circmodal/metrics.hpp"
#include "circmodal/rng.hpp"
#include "circmodal/sample.hpp"

namespace circmodal {

/// Regression curve of one branch. Circular predictors use the truncated
/// Fourier form intercept + sum_k (a_k cos(k theta) + b_k sin(k theta));
/// linear predictors use the polynomial intercept + sum_k c_k x^k.
struct CurveSpec {
    double intercept = 0.0;
    /// harmonics[k] = {cos coefficient, sin coefficient} for frequency k+1.
    std::vector<std::array<double, 2>> harmonics;
    /// poly[k] multiplies x^(k+1).
    std::vector<double> poly;

    double eval(bool circular_predictor, double delta) const;
};

/// One mixture branch: regression curve, mixing weight, and noise
/// dispersion (sigma for normal noise, kappa for von Mises noise).
struct BranchSpec {
    CurveSpec curve;
    double weight = 1.0;
    double dispersion = 0.1;
};

/// Data-generating model for one geometry. Predictors are uniform on
/// (-pi, pi] when circular, uniform on [predictor_lo, predictor_hi]
/// otherwise. The conditional density of the response is the closed-form
/// mixture of the branch noise kernels, which makes exact oracle modes
/// available.
struct SimModel {
    Geometry geometry = Geometry::circ_lin;
    std::vector<BranchSpec> branches;
    double predictor_lo = -kPi;
    double predictor_hi = kPi;

    /// Throws std::invalid_argument on inconsistent fields. Zero
    /// dispersion is allowed for drawing (noiseless branches) but not for
    /// oracle-mode queries.
    void validate() const;
};

/// i.i.d. draws from the model; deterministic given the seed.
RegressionSample draw(const SimModel& model, std::size_t n, std::uint64_t seed);

/// Exact conditional density of the response at r given the predictor at
/// delta. Requires all dispersions positive.
double true_conditional_density(const SimModel& model, double delta, double r);

/// Ground-truth conditional modes at delta: interior local maxima of the
/// closed-form conditional density on a dense response grid, refined by
/// parabolic interpolation.
ModeSet oracle_modes(const SimModel& model, double delta, std::size_t grid_size = 4096);

/// oracle_modes evaluated over a whole mesh, packaged as the true
/// multifunction (density values are exact, iteration counts zero).
ModalMultifunction oracle_multifunction(const SimModel& model,
                                        const std::vector<double>& mesh,
                                        std::size_t grid_size = 4096);

}  // namespace circmodal
