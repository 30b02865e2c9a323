#pragma once

#include "circmodal/errors.hpp"

namespace circmodal {

/// Modified Bessel function of the first kind, order zero. Power series
/// below x = 25, asymptotic expansion above; relative error well under
/// 1e-12 across the supported range (x <= 700 before overflow).
double bessel_i0(double x);

/// exp(-x) * I0(x); stable for arbitrarily large x.
double bessel_i0_scaled(double x);

/// log I0(x) without forming I0 itself.
double log_bessel_i0(double x);

enum class LinearKernelFamily { gaussian };
enum class CircularKernelFamily { von_mises };

/// Symmetric density kernel on the real line with bandwidth h.
///
/// The profile algebra follows the usual mean-shift construction: with
/// l(s) = exp(-s/2) the profile of the Gaussian, g = -l' and the shift
/// weight G(u) = exp(-u^2/2) up to a positive constant that every
/// consumer is invariant to.
class LinearKernel {
public:
    explicit LinearKernel(double bandwidth,
                          LinearKernelFamily family = LinearKernelFamily::gaussian);

    double bandwidth() const { return bandwidth_; }
    LinearKernelFamily family() const { return family_; }

    /// L_h(diff) = phi(diff / h) / h; `diff` is the raw difference.
    double density(double diff) const;

    /// G(u) = exp(-u^2 / 2); `u` is already scaled by the bandwidth.
    double profile_weight(double u) const;

    /// log G(u) = -u^2 / 2 for the scaled argument; hot-path companion of
    /// profile_weight.
    double weight_exponent(double u) const { return -0.5 * u * u; }

private:
    double bandwidth_;
    LinearKernelFamily family_;
};

/// von Mises density kernel on the circle with concentration kappa,
/// satisfying K_kappa(u) = c_kappa * K[kappa (1 - cos u)] with
/// K(s) = exp(-s).
class CircularKernel {
public:
    explicit CircularKernel(double concentration,
                            CircularKernelFamily family = CircularKernelFamily::von_mises);

    double concentration() const { return concentration_; }
    CircularKernelFamily family() const { return family_; }

    /// exp(kappa cos u) / (2 pi I0(kappa)), evaluated in the overflow-safe
    /// form exp(kappa (cos u - 1)) / (2 pi I0(kappa) e^-kappa).
    double density(double u) const;

    /// |K'| at kappa (1 - cos u), i.e. exp(-kappa (1 - cos u)), up to the
    /// positive normalization that mean-shift ratios cancel.
    double shift_weight(double u) const;

    /// kappa (cos u - 1): the common exponent of density and shift_weight.
    double weight_exponent(double u) const;

    /// Same exponent from a precomputed cos(u); avoids the trig call in
    /// inner loops that expand cos(a - b).
    double weight_exponent_from_cos(double cos_u) const {
        return concentration_ * (cos_u - 1.0);
    }

    /// 1 / (2 pi I0(kappa) e^-kappa): density(u) = normalization() *
    /// exp(weight_exponent(u)).
    double normalization() const { return normalization_; }

    double log_normalization() const { return log_normalization_; }

private:
    double concentration_;
    double normalization_;
    double log_normalization_;
    CircularKernelFamily family_;
};

}  // namespace circmodal
