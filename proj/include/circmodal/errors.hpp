#pragma once

#include <stdexcept>
#include <string>

namespace circmodal {

/// Base class for recoverable estimation failures. Aggregating callers
/// (cross-validation, bootstrap scoring) catch these and apply their
/// documented penalty or skip rule instead of aborting.
class estimation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Both weighted component sums of a mean direction vanished, so the
/// direction is undefined.
class degenerate_direction_error : public estimation_error {
public:
    using estimation_error::estimation_error;
};

/// Every mean-shift weight underflowed to zero at some iterate.
class degenerate_weight_error : public estimation_error {
public:
    using estimation_error::estimation_error;
};

/// The predictor marginal at the query point is below the support
/// threshold; the conditional density is undefined there.
class low_support_error : public estimation_error {
public:
    low_support_error(const std::string& what, double location)
        : estimation_error(what), location_(location) {}
    double location() const { return location_; }

private:
    double location_;
};

/// A set distance was requested against an empty mode set.
class undefined_distance_error : public estimation_error {
public:
    using estimation_error::estimation_error;
};

/// Too few observations for the requested procedure.
class insufficient_data_error : public estimation_error {
public:
    using estimation_error::estimation_error;
};

/// Every EM restart collapsed while fitting the parametric pilot.
class pilot_fit_error : public estimation_error {
public:
    using estimation_error::estimation_error;
};

/// The operation is not available for the sample's geometry.
class unsupported_geometry_error : public estimation_error {
public:
    using estimation_error::estimation_error;
};

/// Malformed input file; the message carries the 1-based line number.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace circmodal
