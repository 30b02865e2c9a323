#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "circmodal/circular.hpp"

namespace circmodal {

namespace detail {

/// Maximal runs of equal grid values; a run is a local maximum when both
/// neighboring runs sit strictly lower. Plateau-aware so that peaks
/// falling exactly between two grid points (equal neighboring values) are
/// still found once.
template <class Emit>
void scan_runs_linear(const std::vector<double>& ys, Emit&& emit) {
    const std::size_t n = ys.size();
    std::size_t a = 0;
    while (a < n) {
        std::size_t b = a;
        while (b + 1 < n && ys[b + 1] == ys[a]) {
            ++b;
        }
        if (a > 0 && b + 1 < n && ys[a] > ys[a - 1] && ys[a] > ys[b + 1]) {
            emit(a, b);
        }
        a = b + 1;
    }
}

template <class Emit>
void scan_runs_circular(const std::vector<double>& ys, Emit&& emit) {
    const std::size_t n = ys.size();
    std::size_t start = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (ys[i] != ys[(i + n - 1) % n]) {
            start = i;
            break;
        }
    }
    if (start == n) {
        return;  // constant function: no maxima
    }
    std::size_t offset = 0;
    while (offset < n) {
        const std::size_t a = (start + offset) % n;
        std::size_t len = 1;
        while (len < n && ys[(a + len) % n] == ys[a]) {
            ++len;
        }
        const double left = ys[(a + n - 1) % n];
        const double right = ys[(a + len) % n];
        if (ys[a] > left && ys[a] > right) {
            emit(a, a + len - 1);  // b may exceed n-1; callers reduce mod n
        }
        offset += len;
    }
}

}  // namespace detail

/// Local maxima of f on a dense grid, refined by a three-point parabolic
/// fit so grid quantization drops out of downstream tolerances. With
/// `circular` set, the grid covers (-pi, pi] (lo/hi are ignored) and
/// neighbors wrap; otherwise only interior maxima of [lo, hi] are
/// reported. Returns abscissas in increasing order.
template <class F>
std::vector<double> local_maxima_on_grid(F&& f, double lo, double hi,
                                         std::size_t grid_size, bool circular) {
    if (grid_size < 8) {
        throw std::invalid_argument("local_maxima_on_grid: grid too small");
    }
    std::vector<double> xs(grid_size), ys(grid_size);
    double step;
    if (circular) {
        step = kTwoPi / static_cast<double>(grid_size);
        for (std::size_t i = 0; i < grid_size; ++i) {
            xs[i] = -kPi + step * static_cast<double>(i + 1);
        }
    } else {
        if (!(hi > lo)) {
            throw std::invalid_argument("local_maxima_on_grid: empty interval");
        }
        step = (hi - lo) / static_cast<double>(grid_size - 1);
        for (std::size_t i = 0; i < grid_size; ++i) {
            xs[i] = lo + step * static_cast<double>(i);
        }
    }
    for (std::size_t i = 0; i < grid_size; ++i) {
        ys[i] = f(xs[i]);
    }

    std::vector<double> maxima;
    const auto emit = [&](std::size_t a, std::size_t b) {
        double x;
        if (a == b) {
            // single-point peak: parabola through the neighbors
            const std::size_t prev = (a + grid_size - 1) % grid_size;
            const std::size_t next = (a + 1) % grid_size;
            const double denom = ys[prev] - 2.0 * ys[a] + ys[next];
            double offset = 0.0;
            if (denom < 0.0) {
                offset = 0.5 * step * (ys[prev] - ys[next]) / denom;
                offset = std::max(-0.5 * step, std::min(0.5 * step, offset));
            }
            x = xs[a % grid_size] + offset;
        } else {
            // plateau: its midpoint (indices may pass the wrap point)
            x = xs[a % grid_size] + 0.5 * step * static_cast<double>(b - a);
        }
        maxima.push_back(circular ? Angle(x).value() : x);
    };
    if (circular) {
        detail::scan_runs_circular(ys, emit);
    } else {
        detail::scan_runs_linear(ys, emit);
    }
    std::sort(maxima.begin(), maxima.end());
    return maxima;
}

}  // namespace circmodal
