// Wall-time comparison of the OpenMP multifunction fit against the
// plain-loop reference on a synthetic bimodal workload, with an
// agreement check on the resulting branch sets.
//
// usage: bench_meanshift [n] [mesh] [repeats]

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "circmodal/meanshift.hpp"
#include "circmodal/simulate.hpp"

using namespace circmodal;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool agree(const ModalMultifunction& a, const ModalMultifunction& b) {
    if (a.branches.size() != b.branches.size()) return false;
    for (std::size_t i = 0; i < a.branches.size(); ++i) {
        if (a.branches[i].size() != b.branches[i].size()) return false;
        for (std::size_t k = 0; k < a.branches[i].size(); ++k) {
            if (std::fabs(a.branches[i][k].mode - b.branches[i][k].mode) > 1e-9) return false;
        }
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 2000;
    const std::size_t mesh_count = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 256;
    const int repeats = argc > 3 ? std::atoi(argv[3]) : 3;

    SimModel model;
    model.geometry = Geometry::circ_lin;
    model.branches = {{{1.3, {{0.0, 0.8}}, {}}, 0.5, 0.35},
                      {{-1.3, {{0.0, 0.8}}, {}}, 0.5, 0.35}};
    const RegressionSample sample = draw(model, n, 12345);
    const Bandwidths bw(20.0, 0.35);
    const auto mesh = default_mesh(sample, mesh_count);
    const MeanShiftConfig cfg;

    std::printf("workload: n=%zu mesh=%zu threads=%d repeats=%d\n", n, mesh_count,
                omp_get_max_threads(), repeats);

    // warm-up plus agreement check
    const auto serial_mf = fit_multifunction_serial(sample, bw, mesh, cfg);
    const auto parallel_mf = fit_multifunction(sample, bw, mesh, cfg);
    if (!agree(serial_mf, parallel_mf)) {
        std::printf("FAILED: serial and parallel fits disagree\n");
        return 1;
    }

    double serial_best = 1e300, parallel_best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        (void)fit_multifunction_serial(sample, bw, mesh, cfg);
        serial_best = std::min(serial_best, seconds_since(t0));

        t0 = std::chrono::steady_clock::now();
        (void)fit_multifunction(sample, bw, mesh, cfg);
        parallel_best = std::min(parallel_best, seconds_since(t0));
    }

    std::printf("serial reference : %8.3f s\n", serial_best);
    std::printf("openmp           : %8.3f s\n", parallel_best);
    std::printf("speedup          : %8.2fx\n", serial_best / parallel_best);
    std::printf("agreement        : ok (%zu mesh points)\n", mesh.size());
    return 0;
}
