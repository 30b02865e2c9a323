#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "circmodal/circular.hpp"

namespace circmodal {

/// Deterministic random source with platform-pinned samplers. The
/// distribution code is written out here (canonical uniform from raw
/// bits, Box-Muller, Best-Fisher) so that seeded draws are reproducible
/// independently of standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Independent substream for work item `index` under `root` seed;
    /// splitmix64 over the combined key.
    static Rng split(std::uint64_t root, std::uint64_t index) {
        std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z = z ^ (z >> 31);
        return Rng(z);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; caches the spare deviate.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = kTwoPi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// von Mises deviate with mean direction 0 and concentration kappa,
    /// by the Best-Fisher rejection sampler.
    double von_mises(double kappa) {
        if (kappa < 1e-8) {
            return uniform(-kPi, kPi);
        }
        const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
        const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
        const double r = (1.0 + rho * rho) / (2.0 * rho);
        double f = 0.0;
        for (;;) {
            const double u1 = uniform();
            const double u2 = uniform();
            const double z = std::cos(kPi * u1);
            f = (1.0 + r * z) / (r + z);
            const double c = kappa * (r - f);
            if (c * (2.0 - c) - u2 > 0.0) {
                break;
            }
            if (u2 > 0.0 && std::log(c / u2) + 1.0 - c >= 0.0) {
                break;
            }
        }
        const double side = uniform() < 0.5 ? -1.0 : 1.0;
        return side * std::acos(f);
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace circmodal
