#pragma once

#include <optional>
#include <string>

#include "circmodal/meanshift.hpp"
#include "circmodal/simulate.hpp"

namespace circmodal {

/// Shortest round-trip decimal representation.
std::string format_double(double v);

struct LoadedSample {
    RegressionSample sample;
    /// Number of circular values that fell outside (-pi, pi] in the file
    /// and were wrapped on ingest.
    std::size_t wrapped_count;
};

/// Sample files: a `# geometry=<tag> n=<count>` header line followed by
/// n whitespace-delimited (predictor, response) rows, angles in radians.
LoadedSample read_sample(const std::string& path);
void write_sample(const std::string& path, const RegressionSample& sample);

struct LoadedMultifunction {
    ModalMultifunction multifunction;
    std::optional<Bandwidths> bandwidths;
    std::size_t n = 0;
};

/// Multifunction files: a header echoing geometry, n, bandwidths and mesh
/// size, then one `mesh_value mode_value density_value iterations` row
/// per branch. A mesh point with no surviving branch is a single row with
/// nan mode and density.
void write_multifunction(const std::string& path, const ModalMultifunction& mf,
                         const Bandwidths* bandwidths, std::size_t n);
void write_multifunction_json(const std::string& path, const ModalMultifunction& mf,
                              const Bandwidths* bandwidths, std::size_t n);
LoadedMultifunction read_multifunction(const std::string& path);

/// Simulation model from a JSON configuration file.
SimModel read_sim_model(const std::string& path);

}  // namespace circmodal
