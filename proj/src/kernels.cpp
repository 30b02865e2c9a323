#include "circmodal/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "circmodal/circular.hpp"

namespace circmodal {

namespace {

constexpr double kSeriesAsymptoticSwitch = 25.0;
const double kInvSqrtTwoPi = 1.0 / std::sqrt(kTwoPi);

// Sum_m ((x/2)^2)^m / (m!)^2. All terms positive, no cancellation.
double i0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m <= 200; ++m) {
        term *= q / (static_cast<double>(m) * m);
        sum += term;
        if (term < sum * 1e-18) {
            break;
        }
    }
    return sum;
}

// Asymptotic series for e^-x I0(x) sqrt(2 pi x); valid for x >= ~20.
double i0_scaled_asymptotic_sum(double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < 40; ++k) {
        const double next =
            term * (2.0 * k + 1.0) * (2.0 * k + 1.0) / (8.0 * x * (k + 1.0));
        if (next >= term) {
            break;  // past the optimal truncation point
        }
        term = next;
        sum += term;
        if (term < sum * 1e-18) {
            break;
        }
    }
    return sum;
}

void check_nonnegative(double x) {
    if (!(x >= 0.0)) {
        throw std::invalid_argument("bessel_i0: argument must be >= 0");
    }
}

}  // namespace

double bessel_i0(double x) {
    check_nonnegative(x);
    if (x < kSeriesAsymptoticSwitch) {
        return i0_series(x);
    }
    return std::exp(x) * bessel_i0_scaled(x);
}

double bessel_i0_scaled(double x) {
    check_nonnegative(x);
    if (x < kSeriesAsymptoticSwitch) {
        return std::exp(-x) * i0_series(x);
    }
    return i0_scaled_asymptotic_sum(x) / std::sqrt(kTwoPi * x);
}

double log_bessel_i0(double x) {
    check_nonnegative(x);
    if (x < kSeriesAsymptoticSwitch) {
        return std::log(i0_series(x));
    }
    return x + std::log(i0_scaled_asymptotic_sum(x)) - 0.5 * std::log(kTwoPi * x);
}

LinearKernel::LinearKernel(double bandwidth, LinearKernelFamily family)
    : bandwidth_(bandwidth), family_(family) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw std::invalid_argument("LinearKernel: bandwidth must be positive and finite");
    }
}

double LinearKernel::density(double diff) const {
    const double u = diff / bandwidth_;
    return kInvSqrtTwoPi * std::exp(-0.5 * u * u) / bandwidth_;
}

double LinearKernel::profile_weight(double u) const {
    return std::exp(-0.5 * u * u);
}

CircularKernel::CircularKernel(double concentration, CircularKernelFamily family)
    : concentration_(concentration), family_(family) {
    if (!(concentration > 0.0) || !std::isfinite(concentration)) {
        throw std::invalid_argument(
            "CircularKernel: concentration must be positive and finite");
    }
    // density(u) = normalization * exp(kappa (cos u - 1)) with
    // normalization = e^kappa / (2 pi I0(kappa)), finite for any kappa.
    log_normalization_ = -(std::log(kTwoPi) + std::log(bessel_i0_scaled(concentration)));
    normalization_ = 1.0 / (kTwoPi * bessel_i0_scaled(concentration));
}

double CircularKernel::density(double u) const {
    return normalization_ * std::exp(concentration_ * (std::cos(u) - 1.0));
}

double CircularKernel::shift_weight(double u) const {
    return std::exp(concentration_ * (std::cos(u) - 1.0));
}

double CircularKernel::weight_exponent(double u) const {
    return concentration_ * (std::cos(u) - 1.0);
}

}  // namespace circmodal
