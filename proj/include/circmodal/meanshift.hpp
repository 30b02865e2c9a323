#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "circmodal/density.hpp"

namespace circmodal {

/// Controls for the fixed-point engines and the multifunction fit.
struct MeanShiftConfig {
    /// Iteration cap per trajectory.
    int max_iter = 500;
    /// Convergence threshold on the step magnitude: |y_{l+1} - y_l| for a
    /// real response; max(1 - cos d, |sin d|) of the angular step for a
    /// circular one, so that the fixed-point residual of a converged mode
    /// is below the same threshold in both metrics.
    double tol_step = 1e-8;
    /// Mode dedup radius in the response metric (absolute difference, or
    /// 1 - cos for circular responses). Non-positive requests the
    /// per-geometry default: h/10, or the dissimilarity 1/(10 kappa).
    double merge_tol = 0.0;
    /// Number of nearest-sample starting responses per mesh point.
    int init_neighbors = 10;

    void validate() const;
};

/// One conditional mode with its estimated density and the iteration
/// count of the trajectory that found it.
struct Branch {
    double mode;
    double density;
    int iterations;
};

/// The fitted regression multifunction: for every mesh point, the finite
/// set of conditional modes, sorted by mode value.
struct ModalMultifunction {
    Geometry geometry;
    std::vector<double> mesh;
    std::vector<std::vector<Branch>> branches;
    /// Mesh indices where no mode survived (low support, no convergence,
    /// or all candidates screened out).
    std::vector<std::size_t> empty_points;
};

struct FixedPointResult {
    double mode;
    int iterations;
    bool converged;
};

/// Merge radius actually used for a geometry/bandwidth pair.
double resolved_merge_tol(const MeanShiftConfig& cfg, Geometry geometry,
                          const Bandwidths& bw);

/// omega(y): kernel-weighted mean of the responses with weights
/// K(pred) * G((y - Y_j)/h). The mean shift omega(y) - y has the sign of
/// the conditional density derivative at y.
double shift_step_linear(const ConditionalDensityEstimate& est, double delta, double y);

/// omega~(phi): weighted mean direction with weights w_delta * T(phi - Phi_j);
/// the circular mean shift sin(omega~(phi) - phi) has the sign of the
/// conditional density derivative at phi.
Angle shift_step_circular(const ConditionalDensityEstimate& est, double delta, Angle phi);

/// Iterates the geometry's shift step from `start` until the step
/// magnitude drops below cfg.tol_step or cfg.max_iter is reached. When
/// `trajectory` is given, every iterate including the start is appended.
FixedPointResult run_fixed_point(const ConditionalDensityEstimate& est, double delta,
                                 double start, const MeanShiftConfig& cfg,
                                 std::vector<double>* trajectory = nullptr);

/// Branch set at a single predictor point: local starts, fixed-point
/// runs, merge by descending density, second-derivative screening.
/// Throws low_support_error when the predictor marginal is below the
/// support threshold.
std::vector<Branch> fit_branches_at(const ConditionalDensityEstimate& est, double delta,
                                    const MeanShiftConfig& cfg);

/// Leave-one-out variant for cross-validation: observation `excluded`
/// drops out of every weight sum and out of the start set, exactly as if
/// the estimate had been built on the remaining n-1 observations.
std::vector<Branch> fit_branches_at_loo(const ConditionalDensityEstimate& est, double delta,
                                        std::size_t excluded, const MeanShiftConfig& cfg);

/// Same fit from caller-chosen starting observations (whole-sample or
/// precomputed neighbor sets) instead of the default local
/// initialization.
std::vector<Branch> fit_branches_from(const ConditionalDensityEstimate& est, double delta,
                                      std::span<const std::size_t> start_indices,
                                      const MeanShiftConfig& cfg);

/// Equally spaced mesh: `count` points on (-pi, pi] for circular
/// predictors, or spanning the observed predictor range for linear ones.
std::vector<double> default_mesh(const RegressionSample& sample, std::size_t count = 128);

/// Multifunction fit over the mesh; mesh points are distributed across
/// OpenMP workers and results are identical for any worker count.
ModalMultifunction fit_multifunction(const RegressionSample& sample, const Bandwidths& bw,
                                     const std::vector<double>& mesh,
                                     const MeanShiftConfig& cfg);

/// Plain-loop reference implementation of the same fit, kept for testing
/// and benchmarking against the parallel version.
ModalMultifunction fit_multifunction_serial(const RegressionSample& sample,
                                            const Bandwidths& bw,
                                            const std::vector<double>& mesh,
                                            const MeanShiftConfig& cfg);

}  // namespace circmodal
