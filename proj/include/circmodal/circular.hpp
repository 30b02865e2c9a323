#pragma once

#include <cmath>
#include <span>

#include "circmodal/errors.hpp"

namespace circmodal {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Resultant norm below which a weighted mean direction is declared
/// degenerate.
inline constexpr double kDegenerateResultantTol = 1e-12;

/// A point on the unit circle, stored in radians in the half-open
/// interval (-pi, pi]. Construction wraps; the invariant holds after
/// every operation.
class Angle {
public:
    Angle() = default;

    /// Wraps an arbitrary finite value to (-pi, pi].
    explicit Angle(double radians);

    double value() const { return value_; }

private:
    double value_ = 0.0;
};

/// Unique representative of x modulo 2pi inside (-pi, pi].
inline Angle wrap(double radians) { return Angle(radians); }

/// Cosine dissimilarity 1 - cos(a - b), in [0, 2]; zero iff a == b as
/// angles. Inputs need not be wrapped.
inline double circ_dist(double a, double b) { return 1.0 - std::cos(a - b); }

inline double circ_dist(Angle a, Angle b) {
    return circ_dist(a.value(), b.value());
}

/// atan2(sum w sin, sum w cos) over the given angles. Weights may be
/// signed. Throws degenerate_direction_error when the resultant norm
/// falls below kDegenerateResultantTol.
Angle weighted_mean_direction(std::span<const double> angles,
                              std::span<const double> weights);

}  // namespace circmodal
