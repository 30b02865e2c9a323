#include "circmodal/meanshift.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "circmodal/errors.hpp"

namespace circmodal {

namespace {

/// Terms whose combined exponent trails the maximum by more than this are
/// dropped; exp(-45) ~ 2.9e-20 leaves the weighted sums unchanged at
/// double precision.
constexpr double kExpCutoff = 45.0;

/// Weight engine for repeated shift steps at one predictor point: the
/// predictor log-weights are computed once, each iterate costs one pass
/// of exponent arithmetic plus exponentials for the significant terms.
class StepEngine {
public:
    static constexpr std::size_t kNoExclusion = static_cast<std::size_t>(-1);

    StepEngine(const ConditionalDensityEstimate& est, double delta,
               std::size_t excluded = kNoExclusion)
        : est_(est), lw_(est.size()), combined_(est.size()) {
        est.predictor_log_weights(delta, lw_);
        if (excluded != kNoExclusion) {
            // a -inf log weight removes the observation from every sum
            lw_[excluded] = -std::numeric_limits<double>::infinity();
        }
        marginal_ = est.marginal_from_log_weights(lw_);
        if (excluded != kNoExclusion) {
            marginal_ *= static_cast<double>(est.size()) /
                         static_cast<double>(est.size() - 1);
        }
        if (const auto* k = est.linear_response_kernel()) {
            resp_h_ = k->bandwidth();
            circular_ = false;
        } else {
            resp_kappa_ = est.circular_response_kernel()->concentration();
            circular_ = true;
        }
    }

    double marginal() const { return marginal_; }
    bool circular_response() const { return circular_; }
    std::span<const double> log_weights() const { return lw_; }

    double step(double point) { return circular_ ? step_circular(point) : step_linear(point); }

    /// |omega(m) - m| or |sin(omega~(m) - m)|: the quantity every stored
    /// mode must keep below tol_step.
    double residual(double point) {
        const double next = step(point);
        return circular_ ? std::fabs(std::sin(next - point)) : std::fabs(next - point);
    }

    double density(double point) const {
        return est_.conditional_from_log_weights(lw_, point);
    }

    double density_derivative(double point, int order) const {
        return est_.conditional_derivative_from_log_weights(lw_, point, order);
    }

private:
    double step_linear(double y) {
        const auto& responses = est_.responses();
        const std::size_t n = responses.size();
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            const double u = (y - responses[j]) / resp_h_;
            const double e = lw_[j] - 0.5 * u * u;
            combined_[j] = e;
            if (e > m) m = e;
        }
        if (!std::isfinite(m)) {
            throw degenerate_weight_error(
                "shift_step_linear: all weights vanished numerically");
        }
        const double lim = m - kExpCutoff;
        double wsum = 0.0, wysum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (combined_[j] > lim) {
                const double w = std::exp(combined_[j] - m);
                wsum += w;
                wysum += w * responses[j];
            }
        }
        return wysum / wsum;
    }

    double step_circular(double phi) {
        const auto rsin = est_.response_sin();
        const auto rcos = est_.response_cos();
        const std::size_t n = rsin.size();
        const double cp = std::cos(phi);
        const double sp = std::sin(phi);
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            const double cos_diff = cp * rcos[j] + sp * rsin[j];
            const double e = lw_[j] + resp_kappa_ * (cos_diff - 1.0);
            combined_[j] = e;
            if (e > m) m = e;
        }
        if (!std::isfinite(m)) {
            throw degenerate_weight_error(
                "shift_step_circular: all weights vanished numerically");
        }
        const double lim = m - kExpCutoff;
        double s = 0.0, c = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (combined_[j] > lim) {
                const double w = std::exp(combined_[j] - m);
                s += w * rsin[j];
                c += w * rcos[j];
            }
        }
        if (std::hypot(s, c) < kDegenerateResultantTol) {
            throw degenerate_direction_error(
                "shift_step_circular: resultant vanished; mean direction undefined");
        }
        double angle = std::atan2(s, c);
        if (angle <= -kPi) angle = kPi;
        return angle;
    }

    const ConditionalDensityEstimate& est_;
    std::vector<double> lw_;
    std::vector<double> combined_;
    double marginal_ = 0.0;
    double resp_h_ = 0.0;
    double resp_kappa_ = 0.0;
    bool circular_ = false;
};

double step_magnitude(bool circular, double from, double to) {
    if (!circular) {
        return std::fabs(to - from);
    }
    const double d = to - from;
    return std::max(1.0 - std::cos(d), std::fabs(std::sin(d)));
}

FixedPointResult iterate_engine(StepEngine& engine, double start,
                                const MeanShiftConfig& cfg,
                                std::vector<double>* trajectory) {
    const bool circular = engine.circular_response();
    double cur = start;
    if (trajectory) trajectory->push_back(cur);
    for (int it = 1; it <= cfg.max_iter; ++it) {
        double next;
        try {
            next = engine.step(cur);
        } catch (const estimation_error& e) {
            throw degenerate_weight_error(std::string(e.what()) + " at iterate " +
                                          std::to_string(it));
        }
        const double step = step_magnitude(circular, cur, next);
        cur = next;
        if (trajectory) trajectory->push_back(cur);
        if (step < cfg.tol_step) {
            return {cur, it, true};
        }
    }
    return {cur, cfg.max_iter, false};
}

/// Indices of the cfg.init_neighbors sample points nearest to delta in
/// the predictor metric; ties broken by index.
std::vector<std::size_t> nearest_sample_indices(const RegressionSample& sample,
                                                double delta, int count,
                                                std::size_t excluded) {
    const std::size_t n = sample.size();
    std::vector<std::pair<double, std::size_t>> by_dist;
    by_dist.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == excluded) continue;
        by_dist.push_back({predictor_distance(sample.geometry, delta, sample.predictors[j]), j});
    }
    const std::size_t k =
        std::min<std::size_t>(static_cast<std::size_t>(count), by_dist.size());
    std::partial_sort(by_dist.begin(), by_dist.begin() + k, by_dist.end());
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) {
        order[i] = by_dist[i].second;
    }
    return order;
}

std::vector<Branch> fit_branches_impl(const ConditionalDensityEstimate& est, double delta,
                                      std::size_t excluded, const MeanShiftConfig& cfg,
                                      std::span<const std::size_t> starts_in = {}) {
    cfg.validate();
    const Geometry geometry = est.geometry();
    const double merge_tol = resolved_merge_tol(cfg, geometry, est.bandwidths());

    StepEngine engine(est, delta, excluded);
    if (!(engine.marginal() > kLowSupportThreshold)) {
        throw low_support_error("fit_branches_at: predictor marginal below support threshold",
                                delta);
    }

    std::vector<std::size_t> computed;
    if (starts_in.empty()) {
        computed = nearest_sample_indices(est.sample(), delta, cfg.init_neighbors, excluded);
        starts_in = computed;
    }
    const auto& starts = starts_in;
    std::vector<Branch> candidates;
    std::vector<double> seen_starts;
    for (std::size_t idx : starts) {
        const double start = est.responses()[idx];
        // identical starting responses follow identical trajectories
        if (std::find(seen_starts.begin(), seen_starts.end(), start) != seen_starts.end()) {
            continue;
        }
        seen_starts.push_back(start);
        try {
            const FixedPointResult r = iterate_engine(engine, start, cfg, nullptr);
            if (!r.converged) continue;
            if (engine.residual(r.mode) >= cfg.tol_step) continue;
            candidates.push_back({r.mode, engine.density(r.mode), r.iterations});
        } catch (const degenerate_weight_error&) {
            continue;  // failed trajectory, not a failed fit
        } catch (const degenerate_direction_error&) {
            continue;
        }
    }

    // Merge coincident fixed points, keeping the highest-density one.
    std::sort(candidates.begin(), candidates.end(), [](const Branch& a, const Branch& b) {
        if (a.density != b.density) return a.density > b.density;
        return a.mode < b.mode;
    });
    std::vector<Branch> merged;
    for (const Branch& c : candidates) {
        bool distinct = true;
        for (const Branch& kept : merged) {
            if (response_distance(geometry, c.mode, kept.mode) <= merge_tol) {
                distinct = false;
                break;
            }
        }
        if (distinct) merged.push_back(c);
    }

    // Keep local maxima only: the second-derivative condition screens out
    // antimodes and saddles.
    std::vector<Branch> modes;
    for (const Branch& c : merged) {
        if (engine.density_derivative(c.mode, 2) < 0.0) {
            modes.push_back(c);
        }
    }
    std::sort(modes.begin(), modes.end(),
              [](const Branch& a, const Branch& b) { return a.mode < b.mode; });
    return modes;
}

}  // namespace

void MeanShiftConfig::validate() const {
    if (max_iter < 1) {
        throw std::invalid_argument("MeanShiftConfig: max_iter must be >= 1");
    }
    if (!(tol_step > 0.0) || !std::isfinite(tol_step)) {
        throw std::invalid_argument("MeanShiftConfig: tol_step must be positive");
    }
    if (merge_tol > 0.0 && merge_tol < tol_step) {
        throw std::invalid_argument("MeanShiftConfig: merge_tol must be >= tol_step");
    }
    if (init_neighbors < 1) {
        throw std::invalid_argument("MeanShiftConfig: init_neighbors must be >= 1");
    }
}

double resolved_merge_tol(const MeanShiftConfig& cfg, Geometry geometry,
                          const Bandwidths& bw) {
    if (cfg.merge_tol > 0.0) {
        return cfg.merge_tol;
    }
    if (response_is_circular(geometry)) {
        return 0.1 / bw.response;  // dissimilarity whose angle has 1 - cos = 1/(10 kappa)
    }
    return bw.response / 10.0;
}

double shift_step_linear(const ConditionalDensityEstimate& est, double delta, double y) {
    if (response_is_circular(est.geometry())) {
        throw std::invalid_argument("shift_step_linear: response is circular");
    }
    StepEngine engine(est, delta);
    return engine.step(y);
}

Angle shift_step_circular(const ConditionalDensityEstimate& est, double delta, Angle phi) {
    if (!response_is_circular(est.geometry())) {
        throw std::invalid_argument("shift_step_circular: response is real-valued");
    }
    StepEngine engine(est, delta);
    return Angle(engine.step(phi.value()));
}

FixedPointResult run_fixed_point(const ConditionalDensityEstimate& est, double delta,
                                 double start, const MeanShiftConfig& cfg,
                                 std::vector<double>* trajectory) {
    cfg.validate();
    StepEngine engine(est, delta);
    return iterate_engine(engine, start, cfg, trajectory);
}

std::vector<Branch> fit_branches_at(const ConditionalDensityEstimate& est, double delta,
                                    const MeanShiftConfig& cfg) {
    return fit_branches_impl(est, delta, StepEngine::kNoExclusion, cfg);
}

std::vector<Branch> fit_branches_at_loo(const ConditionalDensityEstimate& est, double delta,
                                        std::size_t excluded, const MeanShiftConfig& cfg) {
    if (excluded >= est.size()) {
        throw std::invalid_argument("fit_branches_at_loo: excluded index out of range");
    }
    if (est.size() < 2) {
        throw insufficient_data_error("fit_branches_at_loo: need at least 2 observations");
    }
    return fit_branches_impl(est, delta, excluded, cfg);
}

std::vector<Branch> fit_branches_from(const ConditionalDensityEstimate& est, double delta,
                                      std::span<const std::size_t> start_indices,
                                      const MeanShiftConfig& cfg) {
    for (std::size_t idx : start_indices) {
        if (idx >= est.size()) {
            throw std::invalid_argument("fit_branches_from: start index out of range");
        }
    }
    if (start_indices.empty()) {
        throw std::invalid_argument("fit_branches_from: start set must be nonempty");
    }
    return fit_branches_impl(est, delta, StepEngine::kNoExclusion, cfg, start_indices);
}

std::vector<double> default_mesh(const RegressionSample& sample, std::size_t count) {
    if (count == 0) {
        throw std::invalid_argument("default_mesh: count must be >= 1");
    }
    std::vector<double> mesh(count);
    if (predictor_is_circular(sample.geometry)) {
        for (std::size_t i = 0; i < count; ++i) {
            mesh[i] = Angle(-kPi + kTwoPi * static_cast<double>(i + 1) /
                                       static_cast<double>(count))
                          .value();
        }
        std::sort(mesh.begin(), mesh.end());
    } else {
        const auto [lo_it, hi_it] =
            std::minmax_element(sample.predictors.begin(), sample.predictors.end());
        const double lo = *lo_it, hi = *hi_it;
        if (count == 1) {
            mesh[0] = 0.5 * (lo + hi);
        } else {
            for (std::size_t i = 0; i < count; ++i) {
                mesh[i] = lo + (hi - lo) * static_cast<double>(i) /
                                   static_cast<double>(count - 1);
            }
            // the interpolation can land one ulp outside the data range
            mesh.front() = lo;
            mesh.back() = hi;
        }
    }
    return mesh;
}

namespace {

std::vector<double> validated_mesh(const RegressionSample& sample,
                                   const std::vector<double>& mesh) {
    if (mesh.empty()) {
        throw std::invalid_argument("fit_multifunction: mesh must be nonempty");
    }
    std::vector<double> out = mesh;
    if (predictor_is_circular(sample.geometry)) {
        for (double& v : out) {
            v = Angle(v).value();
        }
    } else {
        const auto [lo_it, hi_it] =
            std::minmax_element(sample.predictors.begin(), sample.predictors.end());
        for (double v : out) {
            if (v < *lo_it || v > *hi_it) {
                throw std::invalid_argument(
                    "fit_multifunction: mesh point outside the observed predictor range");
            }
        }
    }
    return out;
}

ModalMultifunction fit_impl(const RegressionSample& sample, const Bandwidths& bw,
                            const std::vector<double>& mesh, const MeanShiftConfig& cfg,
                            bool parallel) {
    cfg.validate();
    ModalMultifunction mf;
    mf.geometry = sample.geometry;
    mf.mesh = validated_mesh(sample, mesh);
    mf.branches.assign(mf.mesh.size(), {});

    const ConditionalDensityEstimate est(sample, bw);
    std::exception_ptr failure = nullptr;

    const auto fit_point = [&](std::size_t i) {
        try {
            mf.branches[i] = fit_branches_at(est, mf.mesh[i], cfg);
        } catch (const estimation_error&) {
            // low support / degenerate point: recorded as an empty branch
            // set below, not a global failure
        }
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < static_cast<long>(mf.mesh.size()); ++i) {
            try {
                fit_point(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical(circmodal_fit_failure)
                if (!failure) failure = std::current_exception();
            }
        }
    } else {
        for (std::size_t i = 0; i < mf.mesh.size(); ++i) {
            fit_point(i);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    for (std::size_t i = 0; i < mf.branches.size(); ++i) {
        if (mf.branches[i].empty()) {
            mf.empty_points.push_back(i);
        }
    }
    return mf;
}

}  // namespace

ModalMultifunction fit_multifunction(const RegressionSample& sample, const Bandwidths& bw,
                                     const std::vector<double>& mesh,
                                     const MeanShiftConfig& cfg) {
    return fit_impl(sample, bw, mesh, cfg, true);
}

ModalMultifunction fit_multifunction_serial(const RegressionSample& sample,
                                            const Bandwidths& bw,
                                            const std::vector<double>& mesh,
                                            const MeanShiftConfig& cfg) {
    return fit_impl(sample, bw, mesh, cfg, false);
}

}  // namespace circmodal
