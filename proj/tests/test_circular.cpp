#include <doctest.h>

#include <cmath>
#include <vector>

#include "circmodal/circular.hpp"
#include "circmodal/rng.hpp"

using namespace circmodal;

TEST_SUITE("circular") {

TEST_CASE("wrap maps representatives into (-pi, pi]") {
    CHECK(wrap(0.0).value() == 0.0);
    CHECK(wrap(-kPi).value() == kPi);
    CHECK(wrap(kPi).value() == kPi);
    // 3 pi is not exactly representable; its wrap lands on the endpoint
    // up to the rounding of the input itself.
    CHECK(circ_dist(wrap(3.0 * kPi).value(), kPi) < 1e-15);
    CHECK(wrap(2.5).value() == doctest::Approx(2.5));
    CHECK(wrap(-2.5).value() == doctest::Approx(-2.5));
}

TEST_CASE("wrap rejects non-finite input") {
    CHECK_THROWS_AS(wrap(std::numeric_limits<double>::infinity()), std::invalid_argument);
    CHECK_THROWS_AS(wrap(std::nan("")), std::invalid_argument);
}

TEST_CASE("wrap is idempotent and 2 pi periodic") {
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        const double x = rng.uniform(-50.0, 50.0);
        const double w = wrap(x).value();
        CHECK(w > -kPi);
        CHECK(w <= kPi);
        CHECK(wrap(w).value() == w);
        const int k = static_cast<int>(rng.uniform(-5.0, 5.0));
        CHECK(circ_dist(wrap(x + kTwoPi * k).value(), w) < 1e-12);
    }
}

TEST_CASE("circ_dist basics") {
    CHECK(circ_dist(0.0, 0.0) == 0.0);
    CHECK(circ_dist(0.0, kPi) == doctest::Approx(2.0));
    CHECK(circ_dist(0.0, kPi / 2.0) == doctest::Approx(1.0));
}

TEST_CASE("circ_dist is symmetric, bounded and rotation invariant") {
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const double a = rng.uniform(-kPi, kPi);
        const double b = rng.uniform(-kPi, kPi);
        const double alpha = rng.uniform(-10.0, 10.0);
        const double d = circ_dist(a, b);
        CHECK(d >= 0.0);
        CHECK(d <= 2.0);
        CHECK(d == doctest::Approx(circ_dist(b, a)));
        CHECK(circ_dist(a + alpha, b + alpha) == doctest::Approx(d).epsilon(1e-9));
    }
}

TEST_CASE("weighted_mean_direction trivial cases") {
    const std::vector<double> equal{1.1, 1.1};
    const std::vector<double> ones{1.0, 1.0};
    CHECK(weighted_mean_direction(equal, ones).value() == doctest::Approx(1.1));

    const std::vector<double> bisect{0.0, kPi / 2.0};
    CHECK(weighted_mean_direction(bisect, ones).value() == doctest::Approx(kPi / 4.0));

    const std::vector<double> antipodal{0.0, kPi};
    CHECK_THROWS_AS((void)weighted_mean_direction(antipodal, ones),
                    degenerate_direction_error);
}

TEST_CASE("weighted_mean_direction validates input") {
    const std::vector<double> a{0.0, 1.0};
    const std::vector<double> short_w{1.0};
    CHECK_THROWS_AS((void)weighted_mean_direction(a, short_w), std::invalid_argument);
    const std::vector<double> empty;
    CHECK_THROWS_AS((void)weighted_mean_direction(empty, empty), std::invalid_argument);
    const std::vector<double> bad_w{1.0, std::nan("")};
    CHECK_THROWS_AS((void)weighted_mean_direction(a, bad_w), std::invalid_argument);
}

TEST_CASE("weighted_mean_direction accepts signed weights") {
    // a negative weight flips its contribution to the opposite direction
    const std::vector<double> angles{0.0, kPi / 2.0};
    const std::vector<double> weights{1.0, -1.0};
    CHECK(weighted_mean_direction(angles, weights).value() == doctest::Approx(-kPi / 4.0));
}

TEST_CASE("rotation equivariance of the mean direction") {
    Rng rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform() * 8);
        std::vector<double> angles(n), weights(n), rotated(n);
        const double alpha = rng.uniform(-8.0, 8.0);
        for (int j = 0; j < n; ++j) {
            angles[j] = rng.uniform(-kPi, kPi);
            weights[j] = rng.uniform(-1.0, 2.0);
            rotated[j] = angles[j] + alpha;
        }
        double base;
        try {
            base = weighted_mean_direction(angles, weights).value();
        } catch (const degenerate_direction_error&) {
            continue;
        }
        const double moved = weighted_mean_direction(rotated, weights).value();
        CHECK(circ_dist(moved, base + alpha) < 1e-10);
    }
}

}  // TEST_SUITE
