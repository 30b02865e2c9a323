#include "circmodal/bandwidth.hpp"

#include <omp.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "circmodal/errors.hpp"
#include "circmodal/gridsearch.hpp"
#include "circmodal/metrics.hpp"

namespace circmodal {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

double spread(const std::vector<double>& values) {
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    double s = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    if (!(s > 0.0)) {
        s = sorted.back() - sorted.front();
    }
    return s > 0.0 ? s : 1.0;
}

std::vector<double> log_span(double lo, double hi, int count) {
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) {
        out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    }
    return out;
}

const std::vector<double> kConcentrationGrid = {1, 2, 5, 10, 20, 40, 80};

double penalty_for(const RegressionSample& sample) {
    if (response_is_circular(sample.geometry)) {
        return kEmptySetPenaltyCircular;
    }
    const auto [lo, hi] = std::minmax_element(sample.responses.begin(), sample.responses.end());
    return empty_set_penalty_real(*hi - *lo);
}

/// Tie rule for grid minima: toward the smoother fit (smaller
/// concentration, larger window), predictor axis first.
bool smoother_than(Geometry g, double ap, double ar, double bp, double br) {
    if (ap != bp) {
        return predictor_is_circular(g) ? ap < bp : ap > bp;
    }
    if (ar != br) {
        return response_is_circular(g) ? ar < br : ar > br;
    }
    return false;
}

Bandwidths select_from_table(Geometry g, const ScoreTable& table) {
    std::size_t best_pi = 0, best_ri = 0;
    bool have = false;
    for (std::size_t pi = 0; pi < table.predictor_values.size(); ++pi) {
        for (std::size_t ri = 0; ri < table.response_values.size(); ++ri) {
            if (!have) {
                best_pi = pi;
                best_ri = ri;
                have = true;
                continue;
            }
            const double s = table.at(pi, ri);
            const double best = table.at(best_pi, best_ri);
            if (s < best ||
                (s == best && smoother_than(g, table.predictor_values[pi],
                                            table.response_values[ri],
                                            table.predictor_values[best_pi],
                                            table.response_values[best_ri]))) {
                best_pi = pi;
                best_ri = ri;
            }
        }
    }
    return Bandwidths(table.predictor_values[best_pi], table.response_values[best_ri]);
}

double cv_fold_term(const ConditionalDensityEstimate& est, const MeanShiftConfig& cfg,
                    std::size_t i, double penalty) {
    const RegressionSample& sample = est.sample();
    std::vector<Branch> branches;
    try {
        branches = fit_branches_at_loo(est, sample.predictors[i], i, cfg);
    } catch (const estimation_error&) {
        branches.clear();
    }
    if (branches.empty()) {
        return penalty;
    }
    const double y = sample.responses[i];
    double d = std::numeric_limits<double>::infinity();
    const bool circular = response_is_circular(sample.geometry);
    for (const Branch& b : branches) {
        const double dist = circular ? circ_dist(y, b.mode)
                                     : (y - b.mode) * (y - b.mode);
        d = std::min(d, dist);
    }
    const double count = static_cast<double>(branches.size());
    return d * count * count;
}

double cv_impl(const RegressionSample& sample, const Bandwidths& bw,
               const MeanShiftConfig& cfg, bool parallel) {
    cfg.validate();
    const std::size_t n = sample.size();
    if (n < 3) {
        throw insufficient_data_error("modal_cv_score: need at least 3 observations");
    }
    const double penalty = penalty_for(sample);
    const ConditionalDensityEstimate est(sample, bw);
    std::vector<double> terms(n, 0.0);
    std::exception_ptr failure = nullptr;

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < static_cast<long>(n); ++i) {
            try {
                terms[i] = cv_fold_term(est, cfg, static_cast<std::size_t>(i), penalty);
            } catch (...) {
#pragma omp critical(circmodal_cv_failure)
                if (!failure) failure = std::current_exception();
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            terms[i] = cv_fold_term(est, cfg, i, penalty);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    double sum = 0.0;
    for (double t : terms) {
        sum += t;
    }
    return sum / static_cast<double>(n);
}

}  // namespace

void BandwidthGrid::validate() const {
    const auto check = [](const std::vector<double>& axis, const char* name) {
        if (axis.empty()) {
            throw std::invalid_argument(std::string("BandwidthGrid: empty ") + name + " axis");
        }
        for (std::size_t i = 0; i < axis.size(); ++i) {
            if (!(axis[i] > 0.0) || !std::isfinite(axis[i])) {
                throw std::invalid_argument(std::string("BandwidthGrid: ") + name +
                                            " values must be positive");
            }
            if (i > 0 && !(axis[i] > axis[i - 1])) {
                throw std::invalid_argument(std::string("BandwidthGrid: ") + name +
                                            " values must be strictly increasing");
            }
        }
    };
    check(predictor_values, "predictor");
    check(response_values, "response");
}

BandwidthGrid default_grid(const RegressionSample& sample) {
    BandwidthGrid grid;
    if (predictor_is_circular(sample.geometry)) {
        grid.predictor_values = kConcentrationGrid;
    } else {
        const double s = spread(sample.predictors);
        grid.predictor_values = log_span(0.05 * s, 1.0 * s, 7);
    }
    if (response_is_circular(sample.geometry)) {
        grid.response_values = kConcentrationGrid;
    } else {
        const double s = spread(sample.responses);
        grid.response_values = log_span(0.05 * s, 1.0 * s, 7);
    }
    return grid;
}

double modal_cv_score(const RegressionSample& sample, const Bandwidths& bw,
                      const MeanShiftConfig& cfg) {
    return cv_impl(sample, bw, cfg, true);
}

double modal_cv_score_serial(const RegressionSample& sample, const Bandwidths& bw,
                             const MeanShiftConfig& cfg) {
    return cv_impl(sample, bw, cfg, false);
}

SelectionResult select_by_cv(const RegressionSample& sample, const BandwidthGrid& grid,
                             const MeanShiftConfig& cfg) {
    grid.validate();
    ScoreTable table;
    table.predictor_values = grid.predictor_values;
    table.response_values = grid.response_values;
    table.scores.resize(grid.cells());
    for (std::size_t pi = 0; pi < grid.predictor_values.size(); ++pi) {
        for (std::size_t ri = 0; ri < grid.response_values.size(); ++ri) {
            table.at(pi, ri) = modal_cv_score(
                sample, Bandwidths(grid.predictor_values[pi], grid.response_values[ri]), cfg);
        }
    }
    return {select_from_table(sample.geometry, table), std::move(table)};
}

// ---------------------------------------------------------------------------
// Periodic spline basis
// ---------------------------------------------------------------------------

namespace {

// Cardinal cubic B-spline on [0, 4).
double b3(double t) {
    if (t < 0.0 || t >= 4.0) return 0.0;
    if (t < 1.0) return t * t * t / 6.0;
    if (t < 2.0) return (((-3.0 * t + 12.0) * t - 12.0) * t + 4.0) / 6.0;
    if (t < 3.0) return (((3.0 * t - 24.0) * t + 60.0) * t - 44.0) / 6.0;
    const double u = 4.0 - t;
    return u * u * u / 6.0;
}

}  // namespace

PeriodicSplineBasis::PeriodicSplineBasis(int size) : k_(size), spacing_(kTwoPi / size) {
    if (size < 4) {
        throw std::invalid_argument("PeriodicSplineBasis: need at least 4 basis functions");
    }
}

double PeriodicSplineBasis::eval(int j, double theta) const {
    if (j < 0 || j >= k_) {
        throw std::invalid_argument("PeriodicSplineBasis: basis index out of range");
    }
    const double u = (theta + kPi) / spacing_;
    double t = u - static_cast<double>(j);
    t -= static_cast<double>(k_) * std::floor(t / static_cast<double>(k_));
    return b3(t);
}

void PeriodicSplineBasis::design_row(double theta, std::span<double> out) const {
    if (out.size() != static_cast<std::size_t>(k_) + 1) {
        throw std::invalid_argument("PeriodicSplineBasis: design row has wrong size");
    }
    out[0] = 1.0;
    for (int j = 0; j < k_; ++j) {
        out[j + 1] = eval(j, theta);
    }
}

// ---------------------------------------------------------------------------
// Mixture pilot
// ---------------------------------------------------------------------------

MixturePilot::MixturePilot(PeriodicSplineBasis basis, std::vector<double> weights,
                           std::vector<std::vector<double>> coefficients, double sigma2,
                           double log_likelihood, double bic)
    : basis_(basis),
      weights_(std::move(weights)),
      coefficients_(std::move(coefficients)),
      sigma2_(sigma2),
      log_likelihood_(log_likelihood),
      bic_(bic) {
    if (weights_.empty() || weights_.size() != coefficients_.size()) {
        throw std::invalid_argument("MixturePilot: weights/coefficients mismatch");
    }
    double sum = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0)) throw std::invalid_argument("MixturePilot: negative weight");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-10) {
        throw std::invalid_argument("MixturePilot: weights must sum to 1");
    }
    if (!(sigma2_ > 0.0)) {
        throw std::invalid_argument("MixturePilot: sigma2 must be positive");
    }
    for (const auto& beta : coefficients_) {
        if (beta.size() != static_cast<std::size_t>(basis_.size()) + 1) {
            throw std::invalid_argument("MixturePilot: coefficient row has wrong length");
        }
    }
}

double MixturePilot::regression_curve(int component, double theta) const {
    if (component < 0 || component >= components()) {
        throw std::invalid_argument("MixturePilot: component index out of range");
    }
    std::vector<double> row(basis_.size() + 1);
    basis_.design_row(theta, row);
    double mu = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        mu += coefficients_[component][j] * row[j];
    }
    return mu;
}

double MixturePilot::conditional_density(double theta, double y) const {
    const double norm = 1.0 / std::sqrt(kTwoPi * sigma2_);
    double density = 0.0;
    for (int t = 0; t < components(); ++t) {
        const double r = y - regression_curve(t, theta);
        density += weights_[t] * norm * std::exp(-0.5 * r * r / sigma2_);
    }
    return density;
}

std::vector<double> MixturePilot::conditional_modes(double theta,
                                                    std::size_t grid_size) const {
    std::vector<double> centers(components());
    for (int t = 0; t < components(); ++t) {
        centers[t] = regression_curve(t, theta);
    }
    const auto [lo_it, hi_it] = std::minmax_element(centers.begin(), centers.end());
    const double sigma = std::sqrt(sigma2_);
    const double lo = *lo_it - 6.0 * sigma;
    const double hi = *hi_it + 6.0 * sigma;
    const double norm = 1.0 / std::sqrt(kTwoPi * sigma2_);
    const auto density = [&](double y) {
        double d = 0.0;
        for (int t = 0; t < components(); ++t) {
            const double r = y - centers[t];
            d += weights_[t] * norm * std::exp(-0.5 * r * r / sigma2_);
        }
        return d;
    };
    return local_maxima_on_grid(density, lo, hi, grid_size, false);
}

double MixturePilot::sample_response(double theta, Rng& rng) const {
    const double u = rng.uniform();
    double cum = 0.0;
    int pick = components() - 1;
    for (int t = 0; t < components(); ++t) {
        cum += weights_[t];
        if (u < cum) {
            pick = t;
            break;
        }
    }
    return regression_curve(pick, theta) + std::sqrt(sigma2_) * rng.normal();
}

namespace {

struct EmFit {
    std::vector<double> weights;
    std::vector<std::vector<double>> coefficients;
    double sigma2 = 0.0;
    double log_likelihood = -std::numeric_limits<double>::infinity();
    bool ok = false;
};

EmFit run_em(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, int components,
             Rng& rng, int max_iter, double tol) {
    const long n = design.rows();
    const long p = design.cols();
    EmFit fit;

    // Initial hard assignment: split the residuals around a single global
    // fit at jittered quantile centers. Purely random assignments make
    // the component fits start identical and EM cannot break the
    // symmetry.
    Eigen::MatrixXd resp(n, components);
    resp.setZero();
    {
        Eigen::MatrixXd a0 = design.transpose() * design;
        a0.diagonal().array() += 1e-8 * (a0.trace() / static_cast<double>(p) + 1.0);
        const Eigen::VectorXd beta0 = a0.ldlt().solve(design.transpose() * y);
        const Eigen::VectorXd residual = y - design * beta0;
        std::vector<double> sorted(residual.data(), residual.data() + n);
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> centers(components);
        for (int t = 0; t < components; ++t) {
            const double q = std::min(
                0.999, std::max(0.001, (t + 0.5) / components + 0.2 * (rng.uniform() - 0.5)));
            centers[t] = sorted[static_cast<std::size_t>(q * (n - 1))];
        }
        for (long i = 0; i < n; ++i) {
            int z = 0;
            double best = std::fabs(residual(i) - centers[0]);
            for (int t = 1; t < components; ++t) {
                const double d = std::fabs(residual(i) - centers[t]);
                if (d < best) {
                    best = d;
                    z = t;
                }
            }
            resp(i, z) = 1.0;
        }
    }
    const double y_scale = (y.array() - y.mean()).square().sum() / std::max<long>(n - 1, 1);

    Eigen::MatrixXd betas(p, components);
    Eigen::VectorXd weights(components);
    double sigma2 = 0.0;
    double loglik = -std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < max_iter; ++iter) {
        // M-step
        double rss = 0.0;
        for (int t = 0; t < components; ++t) {
            const double nt = resp.col(t).sum();
            if (!(nt > 1e-8 * static_cast<double>(n))) {
                return fit;  // empty component, restart
            }
            weights(t) = nt / static_cast<double>(n);
            Eigen::MatrixXd a = design.transpose() * resp.col(t).asDiagonal() * design;
            const double ridge = 1e-8 * (a.trace() / static_cast<double>(p) + 1.0);
            a.diagonal().array() += ridge;
            const Eigen::VectorXd b =
                design.transpose() * (resp.col(t).array() * y.array()).matrix();
            betas.col(t) = a.ldlt().solve(b);
            const Eigen::VectorXd residual = y - design * betas.col(t);
            rss += (resp.col(t).array() * residual.array().square()).sum();
        }
        sigma2 = rss / static_cast<double>(n);
        if (!(sigma2 > 1e-14 * (y_scale + 1e-12))) {
            return fit;  // variance collapse
        }

        // E-step with per-row log-sum-exp
        const double log_norm = -0.5 * std::log(kTwoPi * sigma2);
        double ll = 0.0;
        for (long i = 0; i < n; ++i) {
            double m = -std::numeric_limits<double>::infinity();
            Eigen::VectorXd lp(components);
            for (int t = 0; t < components; ++t) {
                const double r = y(i) - design.row(i).dot(betas.col(t));
                lp(t) = std::log(weights(t)) - 0.5 * r * r / sigma2;
                m = std::max(m, lp(t));
            }
            double denom = 0.0;
            for (int t = 0; t < components; ++t) {
                lp(t) = std::exp(lp(t) - m);
                denom += lp(t);
            }
            for (int t = 0; t < components; ++t) {
                resp(i, t) = lp(t) / denom;
            }
            ll += m + std::log(denom) + log_norm;
        }
        if (!std::isfinite(ll)) {
            return fit;
        }
        const bool converged = iter > 0 && std::fabs(ll - loglik) < tol;
        loglik = ll;
        if (converged) {
            break;
        }
    }

    fit.weights.assign(weights.data(), weights.data() + components);
    double wsum = std::accumulate(fit.weights.begin(), fit.weights.end(), 0.0);
    for (double& w : fit.weights) {
        w /= wsum;
    }
    fit.coefficients.resize(components);
    for (int t = 0; t < components; ++t) {
        fit.coefficients[t].assign(betas.col(t).data(), betas.col(t).data() + p);
    }
    fit.sigma2 = sigma2;
    fit.log_likelihood = loglik;
    fit.ok = true;
    return fit;
}

}  // namespace

MixturePilot fit_mixture_pilot(const RegressionSample& sample, int max_components,
                               int basis_size, std::uint64_t seed) {
    if (sample.geometry != Geometry::circ_lin) {
        throw unsupported_geometry_error(
            "fit_mixture_pilot: the pilot is defined for the circ-lin geometry (circular "
            "predictor, real response) only");
    }
    if (max_components < 1) {
        throw std::invalid_argument("fit_mixture_pilot: max_components must be >= 1");
    }
    const PeriodicSplineBasis basis(basis_size);
    const long n = static_cast<long>(sample.size());
    const long p = basis.size() + 1;
    if (n < 10 * p) {
        throw insufficient_data_error("fit_mixture_pilot: need at least 10 (k+1) observations");
    }

    Eigen::MatrixXd design(n, p);
    {
        std::vector<double> row(p);
        for (long i = 0; i < n; ++i) {
            basis.design_row(sample.predictors[i], row);
            for (long j = 0; j < p; ++j) {
                design(i, j) = row[j];
            }
        }
    }
    Eigen::VectorXd y(n);
    for (long i = 0; i < n; ++i) {
        y(i) = sample.responses[i];
    }

    constexpr int kRestarts = 5;
    constexpr int kMaxIter = 300;
    constexpr double kTol = 1e-8;

    bool have_best = false;
    EmFit best;
    double best_bic = std::numeric_limits<double>::infinity();
    for (int components = 1; components <= max_components; ++components) {
        const int restarts = components == 1 ? 1 : kRestarts;
        EmFit best_t;
        for (int r = 0; r < restarts; ++r) {
            Rng rng = Rng::split(seed, static_cast<std::uint64_t>(components) * 1000 + r);
            EmFit fit = run_em(design, y, components, rng, kMaxIter, kTol);
            if (fit.ok && fit.log_likelihood > best_t.log_likelihood) {
                best_t = std::move(fit);
            }
        }
        if (!best_t.ok) {
            continue;
        }
        const double params =
            static_cast<double>(components) * static_cast<double>(p) +
            static_cast<double>(components) - 1.0 + 1.0;
        const double bic = -2.0 * best_t.log_likelihood +
                           params * std::log(static_cast<double>(n));
        if (bic < best_bic) {
            best_bic = bic;
            best = std::move(best_t);
            have_best = true;
        }
    }
    if (!have_best) {
        throw pilot_fit_error("fit_mixture_pilot: every EM restart collapsed");
    }
    return MixturePilot(basis, std::move(best.weights), std::move(best.coefficients),
                        best.sigma2, best.log_likelihood, best_bic);
}

// ---------------------------------------------------------------------------
// Parametric bootstrap
// ---------------------------------------------------------------------------

BootstrapResult bootstrap_ise(const RegressionSample& sample, const BandwidthGrid& grid,
                              const MixturePilot& pilot, int resamples,
                              const MeanShiftConfig& cfg, std::uint64_t seed) {
    if (sample.geometry != Geometry::circ_lin) {
        throw unsupported_geometry_error(
            "bootstrap_ise: supported for the circ-lin geometry only; use modal CV for "
            "circular responses");
    }
    if (resamples < 1) {
        throw std::invalid_argument("bootstrap_ise: resamples must be >= 1");
    }
    grid.validate();
    cfg.validate();

    const std::size_t n = sample.size();
    std::vector<double> mesh = sample.predictors;
    std::sort(mesh.begin(), mesh.end());

    // Pilot modes are independent of the resample and the grid cell.
    std::vector<std::vector<double>> pilot_modes(n);
#pragma omp parallel for schedule(static)
    for (long j = 0; j < static_cast<long>(n); ++j) {
        pilot_modes[j] = pilot.conditional_modes(mesh[j]);
    }

    // So are the local starting sets: nearest neighbors depend only on
    // the fixed predictors.
    std::vector<std::vector<std::size_t>> starts(n);
#pragma omp parallel for schedule(static)
    for (long j = 0; j < static_cast<long>(n); ++j) {
        std::vector<std::pair<double, std::size_t>> by_dist;
        by_dist.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            by_dist.push_back({circ_dist(mesh[j], mesh[i]), i});
        }
        const std::size_t k =
            std::min<std::size_t>(static_cast<std::size_t>(cfg.init_neighbors), n);
        std::partial_sort(by_dist.begin(), by_dist.begin() + k, by_dist.end());
        starts[j].resize(k);
        for (std::size_t i = 0; i < k; ++i) {
            starts[j][i] = by_dist[i].second;
        }
    }

    const double penalty = penalty_for(sample);

    // One substream per resample keeps draws independent of scheduling.
    std::vector<std::vector<double>> boot_responses(resamples);
    for (int b = 0; b < resamples; ++b) {
        Rng rng = Rng::split(seed, static_cast<std::uint64_t>(b));
        boot_responses[b].resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            boot_responses[b][j] = pilot.sample_response(mesh[j], rng);
        }
    }

    const std::size_t cells = grid.cells();
    const std::size_t rcount = grid.response_values.size();
    std::vector<double> item_scores(static_cast<std::size_t>(resamples) * cells, 0.0);
    std::exception_ptr failure = nullptr;

#pragma omp parallel for schedule(dynamic)
    for (long w = 0; w < static_cast<long>(item_scores.size()); ++w) {
        try {
            const std::size_t b = static_cast<std::size_t>(w) / cells;
            const std::size_t cell = static_cast<std::size_t>(w) % cells;
            const Bandwidths bw(grid.predictor_values[cell / rcount],
                                grid.response_values[cell % rcount]);
            const ConditionalDensityEstimate est(
                RegressionSample(Geometry::circ_lin, mesh, boot_responses[b]), bw);
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<Branch> branches;
                try {
                    branches = fit_branches_from(est, mesh[j], starts[j], cfg);
                } catch (const estimation_error&) {
                    branches.clear();
                }
                if (branches.empty()) {
                    sum += penalty;
                    continue;
                }
                ModeSet fitted;
                fitted.circular = false;
                for (const Branch& br : branches) {
                    fitted.values.push_back(br.mode);
                }
                const ModeSet truth{pilot_modes[j], false};
                const double hd = hausdorff(fitted, truth);
                sum += hd * hd;
            }
            item_scores[w] = sum / static_cast<double>(n);
        } catch (...) {
#pragma omp critical(circmodal_boot_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    ScoreTable table;
    table.predictor_values = grid.predictor_values;
    table.response_values = grid.response_values;
    table.scores.assign(cells, 0.0);
    for (int b = 0; b < resamples; ++b) {
        for (std::size_t cell = 0; cell < cells; ++cell) {
            table.scores[cell] += item_scores[static_cast<std::size_t>(b) * cells + cell];
        }
    }
    for (double& s : table.scores) {
        s /= static_cast<double>(resamples);
    }
    return {select_from_table(sample.geometry, table), std::move(table)};
}

}  // namespace circmodal
