#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "circmodal/meanshift.hpp"
#include "circmodal/rng.hpp"

namespace circmodal {

/// Search space for the smoothing pair; values strictly increasing and
/// positive on each axis.
struct BandwidthGrid {
    std::vector<double> predictor_values;
    std::vector<double> response_values;

    void validate() const;
    std::size_t cells() const { return predictor_values.size() * response_values.size(); }
};

/// Default search space: {1, 2, 5, 10, 20, 40, 80} on concentration axes,
/// a logarithmic 7-point span from 0.05 to 1.0 times the variable's
/// interquartile range on window axes.
BandwidthGrid default_grid(const RegressionSample& sample);

/// Scores for every grid cell, row-major over (predictor, response).
struct ScoreTable {
    std::vector<double> predictor_values;
    std::vector<double> response_values;
    std::vector<double> scores;

    double& at(std::size_t pi, std::size_t ri) {
        return scores[pi * response_values.size() + ri];
    }
    double at(std::size_t pi, std::size_t ri) const {
        return scores[pi * response_values.size() + ri];
    }
};

struct SelectionResult {
    Bandwidths selected;
    ScoreTable table;
};

/// Leave-one-out modal cross-validation score: mean over observations of
/// d^2(branches, response) * N^2 for real responses (CV1) or
/// d~(branches, response) * N^2 for circular ones (CV2). Folds whose fit
/// has no surviving branch contribute the worst-case penalty from the
/// metrics module. Folds run across OpenMP workers; the score is
/// identical for any worker count.
double modal_cv_score(const RegressionSample& sample, const Bandwidths& bw,
                      const MeanShiftConfig& cfg);

/// Plain-loop reference for the same score.
double modal_cv_score_serial(const RegressionSample& sample, const Bandwidths& bw,
                             const MeanShiftConfig& cfg);

/// Exhaustive grid minimization of the modal CV score. Ties break toward
/// the smoother fit (smaller concentration, larger window), predictor
/// axis first.
SelectionResult select_by_cv(const RegressionSample& sample, const BandwidthGrid& grid,
                             const MeanShiftConfig& cfg);

/// Cardinal cubic B-spline basis with `size` equally spaced knots on
/// (-pi, pi]; 2 pi periodic, partition of unity.
class PeriodicSplineBasis {
public:
    explicit PeriodicSplineBasis(int size);

    int size() const { return k_; }
    double eval(int j, double theta) const;
    /// out = [1, b_1(theta), ..., b_k(theta)]; out.size() == size() + 1.
    void design_row(double theta, std::span<double> out) const;

private:
    int k_;
    double spacing_;
};

/// Mixture-of-regressions pilot for the parametric bootstrap: common
/// variance normal components whose means are linear in the periodic
/// spline basis of the circular predictor.
class MixturePilot {
public:
    MixturePilot(PeriodicSplineBasis basis, std::vector<double> weights,
                 std::vector<std::vector<double>> coefficients, double sigma2,
                 double log_likelihood, double bic);

    int components() const { return static_cast<int>(weights_.size()); }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<std::vector<double>>& coefficients() const { return coefficients_; }
    double sigma2() const { return sigma2_; }
    double log_likelihood() const { return log_likelihood_; }
    double bic() const { return bic_; }
    const PeriodicSplineBasis& basis() const { return basis_; }

    /// Component regression curve beta_0t + sum beta_jt b_j(theta).
    double regression_curve(int component, double theta) const;

    /// f~(y | theta): the T-component normal mixture density.
    double conditional_density(double theta, double y) const;

    /// Modes of the pilot conditional at theta by dense-grid search with
    /// parabolic refinement.
    std::vector<double> conditional_modes(double theta, std::size_t grid_size = 4096) const;

    /// One draw from the pilot conditional at theta.
    double sample_response(double theta, Rng& rng) const;

private:
    PeriodicSplineBasis basis_;
    std::vector<double> weights_;
    std::vector<std::vector<double>> coefficients_;
    double sigma2_;
    double log_likelihood_;
    double bic_;
};

/// Fits the pilot by EM over component counts 1..max_components and
/// returns the BIC minimizer. Circular-predictor / real-response samples
/// only. Restarts are seeded deterministically from `seed`.
MixturePilot fit_mixture_pilot(const RegressionSample& sample, int max_components,
                               int basis_size = 8, std::uint64_t seed = 0x9D2C5680);

struct BootstrapResult {
    Bandwidths selected;
    ScoreTable table;
};

/// Parametric-bootstrap minimizer of the empirical modal ISE for the
/// circular-predictor / real-response geometry: resamples responses from
/// the pilot conditional (predictors fixed), fits the multifunction at
/// the sample predictors for every grid cell, and averages the squared
/// Hausdorff distance to the pilot modes. Other geometries are out of
/// scope for this selector and raise unsupported_geometry_error; modal
/// CV covers them. Replicate substreams split from `seed` keep the
/// result independent of scheduling.
BootstrapResult bootstrap_ise(const RegressionSample& sample, const BandwidthGrid& grid,
                              const MixturePilot& pilot, int resamples,
                              const MeanShiftConfig& cfg, std::uint64_t seed = 0x2545F491);

}  // namespace circmodal
