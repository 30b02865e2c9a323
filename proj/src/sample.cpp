#include "circmodal/sample.hpp"

#include <cmath>
#include <stdexcept>

namespace circmodal {

const char* geometry_name(Geometry g) {
    switch (g) {
        case Geometry::circ_lin: return "circ-lin";
        case Geometry::lin_circ: return "lin-circ";
        case Geometry::circ_circ: return "circ-circ";
    }
    return "?";
}

std::optional<Geometry> parse_geometry(std::string_view name) {
    if (name == "circ-lin" || name == "circ_lin") return Geometry::circ_lin;
    if (name == "lin-circ" || name == "lin_circ") return Geometry::lin_circ;
    if (name == "circ-circ" || name == "circ_circ") return Geometry::circ_circ;
    return std::nullopt;
}

namespace {

void wrap_in_place(std::vector<double>& values) {
    for (double& v : values) {
        v = Angle(v).value();
    }
}

void check_finite(const std::vector<double>& values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument(std::string("RegressionSample: non-finite ") + what);
        }
    }
}

}  // namespace

RegressionSample::RegressionSample(Geometry geometry, std::vector<double> predictors,
                                   std::vector<double> responses)
    : geometry(geometry),
      predictors(std::move(predictors)),
      responses(std::move(responses)) {
    if (this->predictors.empty() || this->predictors.size() != this->responses.size()) {
        throw std::invalid_argument(
            "RegressionSample: predictors and responses must have equal length >= 1");
    }
    check_finite(this->predictors, "predictor");
    check_finite(this->responses, "response");
    if (predictor_is_circular(geometry)) {
        wrap_in_place(this->predictors);
    }
    if (response_is_circular(geometry)) {
        wrap_in_place(this->responses);
    }
}

Bandwidths::Bandwidths(double predictor_smoothing, double response_smoothing)
    : predictor(predictor_smoothing), response(response_smoothing) {
    if (!(predictor > 0.0) || !std::isfinite(predictor) || !(response > 0.0) ||
        !std::isfinite(response)) {
        throw std::invalid_argument("Bandwidths: both parameters must be positive and finite");
    }
}

}  // namespace circmodal
