#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "cdscap/math.hpp"

namespace cdscap {

/// Uniform grid over [a,b] with the given step; b is always the last node.
inline std::vector<double> uniform_grid(double a, double b, double step) {
    require(b > a, "uniform_grid: empty interval");
    require(step > 0.0, "uniform_grid: step must be positive");
    std::vector<double> g;
    const int n = static_cast<int>(std::ceil((b - a) / step - 1e-12));
    g.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i < n; ++i)
        g.push_back(a + i * step);
    g.push_back(b);
    return g;
}

/// Insert extra knots (kept sorted, de-duplicated to 1e-12); knots outside
/// [grid.front(), grid.back()] are ignored.
inline void insert_knots(std::vector<double>& grid, std::span<const double> knots) {
    const double lo = grid.front(), hi = grid.back();
    for (double k : knots)
        if (k > lo + 1e-12 && k < hi - 1e-12)
            grid.push_back(k);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-12; }),
               grid.end());
}

/// Composite trapezoidal rule over a knot grid. The integrand is called as
/// f(t, mid) where mid is the midpoint of the current segment: evaluations use
/// t for the smooth part, while any piecewise-constant selection (coupon
/// period, add-on bucket, gating) keys off mid so that inserted knots make
/// step functions integrate exactly.
template <class F>
double integrate(std::span<const double> grid, F&& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double a = grid[i], b = grid[i + 1];
        const double m = 0.5 * (a + b);
        acc += 0.5 * (f(a, m) + f(b, m)) * (b - a);
    }
    return acc;
}

} // namespace cdscap
