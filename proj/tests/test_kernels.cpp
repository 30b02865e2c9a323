#include <doctest.h>

#include <cmath>

#include "circmodal/circular.hpp"
#include "circmodal/kernels.hpp"
#include "test_util.hpp"

using namespace circmodal;
using test_util::bessel_i0_series_oracle;
using test_util::rel_err;
using test_util::simpson;

TEST_SUITE("kernels") {

TEST_CASE("bessel_i0 against the power-series oracle") {
    CHECK(bessel_i0(0.0) == 1.0);
    CHECK(rel_err(bessel_i0(1.0), bessel_i0_series_oracle(1.0, 30)) < 1e-10);
    CHECK(rel_err(bessel_i0(10.0), bessel_i0_series_oracle(10.0, 60)) < 1e-10);
    // frozen oracle values
    CHECK(bessel_i0(1.0) == doctest::Approx(1.2660658777520082).epsilon(1e-12));
    CHECK(bessel_i0(10.0) == doctest::Approx(2815.716628466254).epsilon(1e-12));
}

TEST_CASE("bessel_i0 across the series/asymptotic switch") {
    for (double x : {0.1, 1.0, 5.0, 10.0, 24.9, 25.1, 50.0, 120.0, 350.0, 700.0}) {
        const double oracle = bessel_i0_series_oracle(x, 900);
        CHECK(rel_err(bessel_i0(x), oracle) < 1e-10);
        CHECK(rel_err(std::exp(log_bessel_i0(x)) , oracle) < 1e-10);
        CHECK(rel_err(bessel_i0_scaled(x), oracle * std::exp(-x)) < 1e-10);
    }
    CHECK_THROWS_AS((void)bessel_i0(-1.0), std::invalid_argument);
}

TEST_CASE("linear kernel density values") {
    const LinearKernel unit(1.0);
    CHECK(unit.density(0.0) == doctest::Approx(1.0 / std::sqrt(kTwoPi)).epsilon(1e-14));
    const LinearKernel wide(2.0);
    CHECK(wide.density(0.0) == doctest::Approx(0.5 / std::sqrt(kTwoPi)).epsilon(1e-14));
    CHECK(unit.density(1.0) == doctest::Approx(unit.density(-1.0)));
    CHECK_THROWS_AS(LinearKernel(0.0), std::invalid_argument);
    CHECK_THROWS_AS(LinearKernel(-1.0), std::invalid_argument);
}

TEST_CASE("linear shift weight is the unnormalized Gaussian shape") {
    const LinearKernel k(3.0);  // shift weight takes the already-scaled argument
    CHECK(k.profile_weight(0.0) == 1.0);
    CHECK(k.profile_weight(std::sqrt(2.0)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(k.profile_weight(1.7) == doctest::Approx(k.profile_weight(-1.7)));
    CHECK(k.weight_exponent(1.7) == doctest::Approx(std::log(k.profile_weight(1.7))));
}

TEST_CASE("linear kernel integrates to one") {
    for (double h : {0.3, 1.0, 2.5}) {
        const LinearKernel k(h);
        const double mass =
            simpson([&](double u) { return k.density(u); }, -12.0 * h, 12.0 * h, 1 << 12);
        CHECK(std::fabs(mass - 1.0) < 1e-6);
    }
}

TEST_CASE("von Mises density values") {
    // near-zero concentration approaches the uniform density
    const CircularKernel flat(1e-9);
    CHECK(flat.density(0.3) == doctest::Approx(1.0 / kTwoPi).epsilon(1e-6));

    const CircularKernel k1(1.0);
    const double i0_1 = bessel_i0_series_oracle(1.0, 30);
    CHECK(rel_err(k1.density(0.0), std::exp(1.0) / (kTwoPi * i0_1)) < 1e-12);
    CHECK(k1.density(0.0) == doctest::Approx(0.3417).epsilon(1e-3));

    CHECK_THROWS_AS(CircularKernel(0.0), std::invalid_argument);
}

TEST_CASE("von Mises density normalizes over the circle") {
    for (double kappa : {0.5, 5.0, 50.0, 200.0}) {
        const CircularKernel k(kappa);
        const double mass =
            simpson([&](double u) { return k.density(u); }, -kPi, kPi, 1 << 15);
        CHECK(std::fabs(mass - 1.0) < 1e-8);
    }
}

TEST_CASE("circular shift weight closed forms") {
    const CircularKernel k(1.0);
    CHECK(k.shift_weight(0.0) == 1.0);
    CHECK(k.shift_weight(kPi) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(k.shift_weight(0.9) == doctest::Approx(k.shift_weight(-0.9)));
    CHECK(k.weight_exponent(0.9) == doctest::Approx(std::log(k.shift_weight(0.9))));
    CHECK(k.weight_exponent_from_cos(std::cos(0.9)) == doctest::Approx(k.weight_exponent(0.9)));
}

TEST_CASE("von Mises density is periodic and even") {
    const CircularKernel k(7.0);
    for (double u : {0.0, 0.4, 1.3, 2.9}) {
        CHECK(k.density(u) == doctest::Approx(k.density(u + kTwoPi)).epsilon(1e-12));
        CHECK(k.density(u) == doctest::Approx(k.density(-u)).epsilon(1e-12));
    }
}

TEST_CASE("von Mises density decreases away from the center") {
    const CircularKernel k(4.0);
    double prev = k.density(0.0);
    for (int i = 1; i <= 32; ++i) {
        const double u = kPi * static_cast<double>(i) / 32.0;
        const double cur = k.density(u);
        CHECK(cur < prev);
        prev = cur;
    }
    // concentration sharpens the kernel: relative mass away from 0 drops
    const CircularKernel sharp(40.0);
    CHECK(sharp.density(1.0) / sharp.density(0.0) < k.density(1.0) / k.density(0.0));
}

TEST_CASE("derivative identity d/du K = -kappa sin(u) K against central differences") {
    const CircularKernel k(6.0);
    const double step = 1e-6;
    for (int i = 0; i < 40; ++i) {
        const double u = -kPi + kTwoPi * (i + 0.5) / 40.0;
        const double fd = (k.density(u + step) - k.density(u - step)) / (2.0 * step);
        const double closed = -k.concentration() * std::sin(u) * k.density(u);
        CHECK(std::fabs(fd - closed) <=
              1e-6 * std::max({std::fabs(closed), std::fabs(fd), 1e-12}));
    }
}

TEST_CASE("overflow-safe path at large concentration") {
    const CircularKernel huge(5000.0);
    CHECK(std::isfinite(huge.density(0.0)));
    CHECK(huge.density(0.0) > 0.0);
    CHECK(huge.density(kPi) >= 0.0);
    const double mass =
        simpson([&](double u) { return huge.density(u); }, -kPi, kPi, 1 << 16);
    CHECK(std::fabs(mass - 1.0) < 1e-6);
}

}  // TEST_SUITE
