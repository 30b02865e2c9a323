#include "circmodal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "circmodal/errors.hpp"

namespace circmodal {

namespace {

void require_nonempty(const ModeSet& s, const char* who) {
    if (s.values.empty()) {
        throw undefined_distance_error(std::string(who) + ": distance to an empty set is undefined");
    }
}

double directed_sup_inf(const std::vector<double>& from, const std::vector<double>& to,
                        bool circular) {
    double sup = 0.0;
    for (double x : from) {
        double inf = std::numeric_limits<double>::infinity();
        for (double z : to) {
            const double d = circular ? circ_dist(x, z) : std::fabs(x - z);
            if (d < inf) inf = d;
        }
        if (inf > sup) sup = inf;
    }
    return sup;
}

void check_mesh_compatible(const ModalMultifunction& a, const ModalMultifunction& b) {
    if (a.geometry != b.geometry) {
        throw std::invalid_argument("pointwise_error: geometries differ");
    }
    if (a.mesh.size() != b.mesh.size()) {
        throw std::invalid_argument("pointwise_error: mesh sizes differ");
    }
    for (std::size_t i = 0; i < a.mesh.size(); ++i) {
        if (a.mesh[i] != b.mesh[i]) {
            throw std::invalid_argument("pointwise_error: meshes diverge at index " +
                                        std::to_string(i) + " (" + std::to_string(a.mesh[i]) +
                                        " vs " + std::to_string(b.mesh[i]) + ")");
        }
    }
}

std::vector<double> branch_modes(const std::vector<Branch>& branches) {
    std::vector<double> out;
    out.reserve(branches.size());
    for (const Branch& b : branches) {
        out.push_back(b.mode);
    }
    return out;
}

}  // namespace

double hausdorff(const ModeSet& a, const ModeSet& b) {
    if (a.circular || b.circular) {
        throw std::invalid_argument("hausdorff: requires real-valued sets");
    }
    require_nonempty(a, "hausdorff");
    require_nonempty(b, "hausdorff");
    return std::max(directed_sup_inf(a.values, b.values, false),
                    directed_sup_inf(b.values, a.values, false));
}

double circular_hausdorff(const ModeSet& a, const ModeSet& b) {
    if (!a.circular || !b.circular) {
        throw std::invalid_argument("circular_hausdorff: requires circular sets");
    }
    require_nonempty(a, "circular_hausdorff");
    require_nonempty(b, "circular_hausdorff");
    return std::max(directed_sup_inf(a.values, b.values, true),
                    directed_sup_inf(b.values, a.values, true));
}

double pointwise_error(const ModalMultifunction& truth, const ModalMultifunction& estimate,
                       std::size_t mesh_index) {
    check_mesh_compatible(truth, estimate);
    if (mesh_index >= truth.mesh.size()) {
        throw std::invalid_argument("pointwise_error: mesh index out of range");
    }
    if (truth.branches[mesh_index].empty() || estimate.branches[mesh_index].empty()) {
        throw undefined_distance_error("pointwise_error: empty branch set at mesh index " +
                                       std::to_string(mesh_index));
    }
    const bool circular = response_is_circular(truth.geometry);
    const ModeSet a{branch_modes(truth.branches[mesh_index]), circular};
    const ModeSet b{branch_modes(estimate.branches[mesh_index]), circular};
    return circular ? circular_hausdorff(a, b) : hausdorff(a, b);
}

GlobalError empirical_global_error(const ModalMultifunction& truth,
                                   const ModalMultifunction& estimate) {
    check_mesh_compatible(truth, estimate);
    const bool circular = response_is_circular(truth.geometry);
    double sum = 0.0;
    std::size_t defined = 0, undefined = 0;
    for (std::size_t i = 0; i < truth.mesh.size(); ++i) {
        if (truth.branches[i].empty() || estimate.branches[i].empty()) {
            ++undefined;
            continue;
        }
        const double lambda = pointwise_error(truth, estimate, i);
        sum += circular ? lambda : lambda * lambda;
        ++defined;
    }
    if (defined == 0) {
        throw undefined_distance_error(
            "empirical_global_error: every mesh point has an empty branch set");
    }
    return {sum / static_cast<double>(defined), undefined};
}

}  // namespace circmodal
