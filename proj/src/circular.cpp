#include "circmodal/circular.hpp"

#include <cmath>
#include <stdexcept>

namespace circmodal {

Angle::Angle(double radians) {
    if (!std::isfinite(radians)) {
        throw std::invalid_argument("Angle: value must be finite");
    }
    // remainder() lands in [-pi, pi]; -pi itself belongs to the excluded
    // endpoint and maps to pi.
    double r = std::remainder(radians, kTwoPi);
    if (r <= -kPi) {
        r = kPi;
    }
    value_ = r;
}

Angle weighted_mean_direction(std::span<const double> angles,
                              std::span<const double> weights) {
    if (angles.empty() || angles.size() != weights.size()) {
        throw std::invalid_argument(
            "weighted_mean_direction: angles and weights must have equal "
            "positive length");
    }
    double s = 0.0, s_c = 0.0;  // Kahan-compensated sine sum
    double c = 0.0, c_c = 0.0;  // Kahan-compensated cosine sum
    for (std::size_t j = 0; j < angles.size(); ++j) {
        const double w = weights[j];
        if (!std::isfinite(w)) {
            throw std::invalid_argument(
                "weighted_mean_direction: weights must be finite");
        }
        double term = w * std::sin(angles[j]);
        double y = term - s_c;
        double t = s + y;
        s_c = (t - s) - y;
        s = t;

        term = w * std::cos(angles[j]);
        y = term - c_c;
        t = c + y;
        c_c = (t - c) - y;
        c = t;
    }
    if (std::hypot(s, c) < kDegenerateResultantTol) {
        throw degenerate_direction_error(
            "weighted_mean_direction: both component sums vanish; the mean "
            "direction is undefined");
    }
    return Angle(std::atan2(s, c));
}

}  // namespace circmodal
