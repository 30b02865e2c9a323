#include "circmodal/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "circmodal/gridsearch.hpp"
#include "circmodal/kernels.hpp"

namespace circmodal {

double CurveSpec::eval(bool circular_predictor, double delta) const {
    double v = intercept;
    if (circular_predictor) {
        for (std::size_t k = 0; k < harmonics.size(); ++k) {
            const double freq = static_cast<double>(k + 1);
            v += harmonics[k][0] * std::cos(freq * delta) +
                 harmonics[k][1] * std::sin(freq * delta);
        }
    } else {
        double power = 1.0;
        for (double c : poly) {
            power *= delta;
            v += c * power;
        }
    }
    return v;
}

void SimModel::validate() const {
    if (branches.empty()) {
        throw std::invalid_argument("SimModel: at least one branch required");
    }
    double weight_sum = 0.0;
    for (const BranchSpec& b : branches) {
        if (!(b.weight > 0.0) || !std::isfinite(b.weight)) {
            throw std::invalid_argument("SimModel: branch weights must be positive");
        }
        if (!(b.dispersion >= 0.0) || !std::isfinite(b.dispersion)) {
            throw std::invalid_argument("SimModel: branch dispersions must be >= 0");
        }
        weight_sum += b.weight;
    }
    if (std::fabs(weight_sum - 1.0) > 1e-9) {
        throw std::invalid_argument("SimModel: branch weights must sum to 1");
    }
    if (!predictor_is_circular(geometry) && !(predictor_lo < predictor_hi)) {
        throw std::invalid_argument("SimModel: predictor interval is empty");
    }
}

namespace {

std::size_t pick_branch(const SimModel& model, double u) {
    double cum = 0.0;
    for (std::size_t t = 0; t < model.branches.size(); ++t) {
        cum += model.branches[t].weight;
        if (u < cum) {
            return t;
        }
    }
    return model.branches.size() - 1;
}

void require_positive_dispersions(const SimModel& model, const char* who) {
    for (const BranchSpec& b : model.branches) {
        if (!(b.dispersion > 0.0)) {
            throw std::invalid_argument(std::string(who) +
                                        ": requires strictly positive dispersions");
        }
    }
}

}  // namespace

RegressionSample draw(const SimModel& model, std::size_t n, std::uint64_t seed) {
    model.validate();
    if (n < 1) {
        throw std::invalid_argument("draw: n must be >= 1");
    }
    const bool circ_pred = predictor_is_circular(model.geometry);
    const bool circ_resp = response_is_circular(model.geometry);
    Rng rng(seed);
    std::vector<double> predictors(n), responses(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double delta = circ_pred ? rng.uniform(-kPi, kPi)
                                       : rng.uniform(model.predictor_lo, model.predictor_hi);
        const BranchSpec& branch = model.branches[pick_branch(model, rng.uniform())];
        const double center = branch.curve.eval(circ_pred, delta);
        double response;
        if (circ_resp) {
            const double noise = branch.dispersion > 0.0 ? rng.von_mises(branch.dispersion) : 0.0;
            response = Angle(center + noise).value();
        } else {
            response = center + branch.dispersion * rng.normal();
        }
        predictors[i] = delta;
        responses[i] = response;
    }
    return RegressionSample(model.geometry, std::move(predictors), std::move(responses));
}

double true_conditional_density(const SimModel& model, double delta, double r) {
    model.validate();
    require_positive_dispersions(model, "true_conditional_density");
    const bool circ_pred = predictor_is_circular(model.geometry);
    const bool circ_resp = response_is_circular(model.geometry);
    double density = 0.0;
    for (const BranchSpec& b : model.branches) {
        const double center = b.curve.eval(circ_pred, delta);
        if (circ_resp) {
            const double norm = 1.0 / (kTwoPi * bessel_i0_scaled(b.dispersion));
            density += b.weight * norm * std::exp(b.dispersion * (std::cos(r - center) - 1.0));
        } else {
            const double u = (r - center) / b.dispersion;
            density += b.weight * std::exp(-0.5 * u * u) /
                       (b.dispersion * std::sqrt(kTwoPi));
        }
    }
    return density;
}

ModeSet oracle_modes(const SimModel& model, double delta, std::size_t grid_size) {
    model.validate();
    require_positive_dispersions(model, "oracle_modes");
    if (grid_size < 512) {
        throw std::invalid_argument("oracle_modes: grid_size must be >= 512");
    }
    const bool circ_pred = predictor_is_circular(model.geometry);
    const bool circ_resp = response_is_circular(model.geometry);
    const auto density = [&](double r) { return true_conditional_density(model, delta, r); };

    double lo = 0.0, hi = 0.0;
    if (!circ_resp) {
        double min_center = std::numeric_limits<double>::infinity();
        double max_center = -std::numeric_limits<double>::infinity();
        double max_sigma = 0.0;
        for (const BranchSpec& b : model.branches) {
            const double c = b.curve.eval(circ_pred, delta);
            min_center = std::min(min_center, c);
            max_center = std::max(max_center, c);
            max_sigma = std::max(max_sigma, b.dispersion);
        }
        lo = min_center - 6.0 * max_sigma;
        hi = max_center + 6.0 * max_sigma;
    }
    ModeSet out;
    out.circular = circ_resp;
    out.values = local_maxima_on_grid(density, lo, hi, grid_size, circ_resp);
    return out;
}

ModalMultifunction oracle_multifunction(const SimModel& model,
                                        const std::vector<double>& mesh,
                                        std::size_t grid_size) {
    ModalMultifunction mf;
    mf.geometry = model.geometry;
    mf.mesh = mesh;
    if (predictor_is_circular(model.geometry)) {
        for (double& v : mf.mesh) {
            v = Angle(v).value();
        }
    }
    mf.branches.reserve(mf.mesh.size());
    for (double delta : mf.mesh) {
        const ModeSet modes = oracle_modes(model, delta, grid_size);
        std::vector<Branch> row;
        row.reserve(modes.values.size());
        for (double m : modes.values) {
            row.push_back({m, true_conditional_density(model, delta, m), 0});
        }
        mf.branches.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < mf.branches.size(); ++i) {
        if (mf.branches[i].empty()) {
            mf.empty_points.push_back(i);
        }
    }
    return mf;
}

}  // namespace circmodal
