#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "circmodal/circular.hpp"

namespace test_util {

inline double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

/// Independent power-series oracle for I0: Sum_m ((x/2)^2)^m / (m!)^2.
inline double bessel_i0_series_oracle(double x, int terms) {
    double sum = 1.0;
    double term = 1.0;
    for (int m = 1; m <= terms; ++m) {
        term *= (x * x / 4.0) / (static_cast<double>(m) * m);
        sum += term;
    }
    return sum;
}

/// Composite Simpson quadrature with 2*panels subintervals.
inline double simpson(const std::function<double(double)>& f, double lo, double hi,
                      std::size_t panels) {
    const double h = (hi - lo) / (2.0 * static_cast<double>(panels));
    double sum = f(lo) + f(hi);
    for (std::size_t i = 1; i < 2 * panels; ++i) {
        sum += f(lo + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

/// Local maxima of f on a dense grid; the independent route against
/// which the fixed-point engines are checked. No refinement: callers
/// match within a multiple of the grid spacing. Plateau runs of equal
/// values count once, at their midpoint.
inline std::vector<double> grid_local_maxima(const std::function<double(double)>& f,
                                             double lo, double hi, std::size_t grid_size,
                                             bool circular) {
    std::vector<double> xs(grid_size), ys(grid_size);
    double step;
    if (circular) {
        step = circmodal::kTwoPi / static_cast<double>(grid_size);
        for (std::size_t i = 0; i < grid_size; ++i) {
            xs[i] = -circmodal::kPi + step * static_cast<double>(i + 1);
        }
    } else {
        step = (hi - lo) / static_cast<double>(grid_size - 1);
        for (std::size_t i = 0; i < grid_size; ++i) {
            xs[i] = lo + step * static_cast<double>(i);
        }
    }
    for (std::size_t i = 0; i < grid_size; ++i) {
        ys[i] = f(xs[i]);
    }
    std::vector<double> maxima;
    if (circular) {
        std::size_t start = grid_size;
        for (std::size_t i = 0; i < grid_size; ++i) {
            if (ys[i] != ys[(i + grid_size - 1) % grid_size]) {
                start = i;
                break;
            }
        }
        if (start == grid_size) return maxima;
        std::size_t offset = 0;
        while (offset < grid_size) {
            const std::size_t a = (start + offset) % grid_size;
            std::size_t len = 1;
            while (len < grid_size && ys[(a + len) % grid_size] == ys[a]) ++len;
            const double left = ys[(a + grid_size - 1) % grid_size];
            const double right = ys[(a + len) % grid_size];
            if (ys[a] > left && ys[a] > right) {
                const double x = xs[a] + 0.5 * step * static_cast<double>(len - 1);
                maxima.push_back(circmodal::Angle(x).value());
            }
            offset += len;
        }
    } else {
        std::size_t a = 0;
        while (a < grid_size) {
            std::size_t b = a;
            while (b + 1 < grid_size && ys[b + 1] == ys[a]) ++b;
            if (a > 0 && b + 1 < grid_size && ys[a] > ys[a - 1] && ys[a] > ys[b + 1]) {
                maxima.push_back(0.5 * (xs[a] + xs[b]));
            }
            a = b + 1;
        }
    }
    std::sort(maxima.begin(), maxima.end());
    return maxima;
}

/// Set match within tolerance: every element of a has a partner in b and
/// vice versa, and the sets have equal size.
inline bool sets_match(const std::vector<double>& a, const std::vector<double>& b,
                       double tol, bool circular) {
    if (a.size() != b.size()) return false;
    const auto dist = [&](double x, double y) {
        if (!circular) return std::fabs(x - y);
        return std::fabs(circmodal::Angle(x - y).value());
    };
    for (double x : a) {
        bool found = false;
        for (double y : b) {
            if (dist(x, y) <= tol) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    for (double y : b) {
        bool found = false;
        for (double x : a) {
            if (dist(x, y) <= tol) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace test_util
