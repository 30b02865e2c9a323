#include <doctest.h>

#include <cmath>
#include <vector>

#include "circmodal/simulate.hpp"
#include "test_util.hpp"

using namespace circmodal;
using test_util::simpson;

namespace {

SimModel single_branch() {
    SimModel m;
    m.geometry = Geometry::circ_lin;
    m.branches = {{{0.7, {{0.5, 0.3}}, {}}, 1.0, 0.25}};
    return m;
}

}  // namespace

TEST_SUITE("simulate") {

TEST_CASE("zero dispersion reproduces the branch curve exactly") {
    SimModel m = single_branch();
    m.branches[0].dispersion = 0.0;
    const auto s = draw(m, 50, 7);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s.responses[i] ==
              doctest::Approx(m.branches[0].curve.eval(true, s.predictors[i])).epsilon(1e-14));
    }
}

TEST_CASE("draws are deterministic given the seed") {
    const SimModel m = single_branch();
    const auto a = draw(m, 200, 99);
    const auto b = draw(m, 200, 99);
    CHECK(a.predictors == b.predictors);
    CHECK(a.responses == b.responses);
    const auto c = draw(m, 200, 100);
    CHECK(a.responses != c.responses);
}

TEST_CASE("branch proportions concentrate around the mixing weights") {
    SimModel m;
    m.geometry = Geometry::circ_lin;
    m.branches = {{{5.0, {}, {}}, 0.5, 0.01}, {{-5.0, {}, {}}, 0.5, 0.01}};
    const auto s = draw(m, 10000, 321);
    std::size_t upper = 0;
    for (double y : s.responses) {
        if (y > 0.0) ++upper;
    }
    CHECK(std::fabs(static_cast<double>(upper) / 10000.0 - 0.5) < 0.02);
}

TEST_CASE("model validation") {
    SimModel m = single_branch();
    m.branches[0].weight = 0.7;  // weights no longer sum to one
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = single_branch();
    m.branches[0].dispersion = -0.1;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = single_branch();
    m.branches.clear();
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    SimModel lin;
    lin.geometry = Geometry::lin_circ;
    lin.branches = {{{0.0, {}, {1.0}}, 1.0, 5.0}};
    lin.predictor_lo = 2.0;
    lin.predictor_hi = 1.0;
    CHECK_THROWS_AS(lin.validate(), std::invalid_argument);
}

TEST_CASE("true conditional density integrates to one") {
    SimModel m;
    m.geometry = Geometry::circ_circ;
    m.branches = {{{1.0, {{0.4, 0.0}}, {}}, 0.6, 4.0}, {{-1.5, {}, {}}, 0.4, 9.0}};
    const double mass = simpson(
        [&](double r) { return true_conditional_density(m, 0.4, r); }, -kPi, kPi, 1 << 13);
    CHECK(std::fabs(mass - 1.0) < 1e-8);
}

TEST_CASE("oracle modes: single normal branch peaks at the curve value") {
    const SimModel m = single_branch();
    for (double theta : {-2.0, 0.0, 1.3}) {
        const ModeSet modes = oracle_modes(m, theta, 4096);
        REQUIRE(modes.values.size() == 1);
        CHECK(std::fabs(modes.values[0] - m.branches[0].curve.eval(true, theta)) < 1e-6);
    }
}

TEST_CASE("oracle modes: symmetric von Mises pair at +-pi/2") {
    SimModel m;
    m.geometry = Geometry::lin_circ;
    m.branches = {{{kPi / 2.0, {}, {}}, 0.5, 6.0}, {{-kPi / 2.0, {}, {}}, 0.5, 6.0}};
    m.predictor_lo = -1.0;
    m.predictor_hi = 1.0;
    const ModeSet modes = oracle_modes(m, 0.3, 4096);
    REQUIRE(modes.values.size() == 2);
    CHECK(std::fabs(modes.values[0] + kPi / 2.0) < 1e-5);
    CHECK(std::fabs(modes.values[1] - kPi / 2.0) < 1e-5);
}

TEST_CASE("normal branches closer than sigma merge into one mode") {
    SimModel m;
    m.geometry = Geometry::circ_lin;
    m.branches = {{{0.3, {}, {}}, 0.5, 0.5}, {{0.0, {}, {}}, 0.5, 0.5}};
    const ModeSet modes = oracle_modes(m, 0.0, 4096);
    CHECK(modes.values.size() == 1);
    // the analytic derivative changes sign exactly once on the grid
    int sign_changes = 0;
    double prev = 0.0;
    for (int i = 0; i <= 2048; ++i) {
        const double y = -2.0 + 4.5 * i / 2048.0;
        const double step = 1e-6;
        const double d = (true_conditional_density(m, 0.0, y + step) -
                          true_conditional_density(m, 0.0, y - step));
        if (i > 0 && d * prev < 0.0) ++sign_changes;
        if (d != 0.0) prev = d;
    }
    CHECK(sign_changes == 1);
}

TEST_CASE("oracle rejects zero dispersion and tiny grids") {
    SimModel m = single_branch();
    m.branches[0].dispersion = 0.0;
    CHECK_THROWS_AS((void)oracle_modes(m, 0.0, 4096), std::invalid_argument);
    const SimModel ok = single_branch();
    CHECK_THROWS_AS((void)oracle_modes(ok, 0.0, 100), std::invalid_argument);
}

TEST_CASE("oracle multifunction is rotation equivariant") {
    SimModel m;
    m.geometry = Geometry::circ_circ;
    m.branches = {{{1.0, {{0.7, 0.0}}, {}}, 0.5, 7.0}, {{-1.8, {{0.7, 0.0}}, {}}, 0.5, 7.0}};
    std::vector<double> mesh{-2.0, -0.5, 0.8, 2.5};
    const auto base = oracle_multifunction(m, mesh, 4096);

    // rotating every branch curve by alpha rotates the oracle modes
    const double alpha = 1.1;
    SimModel rotated = m;
    for (auto& b : rotated.branches) {
        b.curve.intercept += alpha;
    }
    const auto rot = oracle_multifunction(rotated, mesh, 4096);
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        REQUIRE(rot.branches[i].size() == base.branches[i].size());
        for (std::size_t k = 0; k < base.branches[i].size(); ++k) {
            CHECK(circ_dist(rot.branches[i][k].mode, base.branches[i][k].mode + alpha) < 1e-8);
        }
    }
}

}  // TEST_SUITE
