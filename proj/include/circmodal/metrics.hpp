#pragma once

#include <cstddef>
#include <vector>

#include "circmodal/meanshift.hpp"

namespace circmodal {

/// Finite nonempty set of response points, tagged real or circular.
struct ModeSet {
    std::vector<double> values;
    bool circular = false;
};

/// Worst-case surrogate distance assigned by selection procedures when an
/// estimated branch set is empty (circular metrics are bounded by 2).
inline constexpr double kEmptySetPenaltyCircular = 2.0;

/// 2 * range^2: the worst-case surrogate for real-valued responses
/// spanning `response_range`.
inline double empty_set_penalty_real(double response_range) {
    return 2.0 * response_range * response_range;
}

/// Exact Hausdorff distance between finite real-valued sets with
/// d(x, A) = inf |x - z|.
double hausdorff(const ModeSet& a, const ModeSet& b);

/// Hausdorff-type distance between finite angle sets with the cosine
/// dissimilarity d~(x, A) = inf 1 - cos(x - z); range [0, 2].
double circular_hausdorff(const ModeSet& a, const ModeSet& b);

/// Pointwise error Lambda at one mesh index: hausdorff of the two branch
/// sets for real responses, circular_hausdorff for circular ones.
double pointwise_error(const ModalMultifunction& truth, const ModalMultifunction& estimate,
                       std::size_t mesh_index);

struct GlobalError {
    double value;
    std::size_t undefined_points;
};

/// Mesh average of Lambda^2 (real response) or of Lambda~ (circular
/// response): the empirical integrand of the modal ISE / circular IE.
/// Mesh points where either branch set is empty are excluded and counted.
GlobalError empirical_global_error(const ModalMultifunction& truth,
                                   const ModalMultifunction& estimate);

}  // namespace circmodal
