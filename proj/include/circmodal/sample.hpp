#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "circmodal/circular.hpp"

namespace circmodal {

/// The three regression geometries: circular predictor / real response,
/// real predictor / circular response, circular predictor and response.
enum class Geometry { circ_lin, lin_circ, circ_circ };

inline bool predictor_is_circular(Geometry g) { return g != Geometry::lin_circ; }
inline bool response_is_circular(Geometry g) { return g != Geometry::circ_lin; }

const char* geometry_name(Geometry g);
std::optional<Geometry> parse_geometry(std::string_view name);

/// Paired (predictor, response) observations. Circular margins are
/// wrapped to (-pi, pi] on construction; all values are finite.
struct RegressionSample {
    RegressionSample(Geometry geometry, std::vector<double> predictors,
                     std::vector<double> responses);

    std::size_t size() const { return predictors.size(); }

    Geometry geometry;
    std::vector<double> predictors;
    std::vector<double> responses;
};

/// The smoothing pair: concentration (kappa or nu) for circular margins,
/// window h for linear margins.
struct Bandwidths {
    Bandwidths(double predictor_smoothing, double response_smoothing);

    double predictor;
    double response;
};

/// 1 - cos for circular predictors, absolute difference for linear ones.
inline double predictor_distance(Geometry g, double a, double b) {
    return predictor_is_circular(g) ? circ_dist(a, b) : (a > b ? a - b : b - a);
}

/// 1 - cos for circular responses, absolute difference for real ones.
inline double response_distance(Geometry g, double a, double b) {
    return response_is_circular(g) ? circ_dist(a, b) : (a > b ? a - b : b - a);
}

}  // namespace circmodal
