#pragma once

#include <cmath>
#include <vector>

#include "sforge/core.hpp"

namespace sforge {

bool is_uniform(const std::vector<double>& grid, double rel_tol = 1e-9);

// Cumulative integral from grid[0]; each interval integrates the quadratic
// through three neighbouring samples.
template <typename T>
std::vector<T> cumulative_integral(const std::vector<double>& grid, const std::vector<T>& f) {
    const std::size_t n = grid.size();
    std::vector<T> out(n);
    if (n == 0) return out;
    out[0] = f[0] * 0.0;
    if (n == 2) {
        out[1] = out[0] + (f[0] + f[1]) * (0.5 * (grid[1] - grid[0]));
        return out;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        // Stencil (a, b, c) with the interval [b, c] or [a, b].
        const std::size_t s = (i == 0) ? 0 : i - 1;
        const double x0 = grid[s], x1 = grid[s + 1], x2 = grid[s + 2];
        const double lo = grid[i], hi = grid[i + 1];
        // Exact integral of the Lagrange basis polynomials over [lo, hi], in
        // coordinates shifted to lo (absolute ones cancel badly on fine grids).
        auto basis_integral = [&](double xa, double xb, double xc) {
            const double denom = (xa - xb) * (xa - xc);
            const double b = xb - lo, c = xc - lo, y = hi - lo;
            return (y * y * y / 3.0 - (b + c) * y * y / 2.0 + b * c * y) / denom;
        };
        const double w0 = basis_integral(x0, x1, x2);
        const double w1 = basis_integral(x1, x0, x2);
        const double w2 = basis_integral(x2, x0, x1);
        out[i + 1] = out[i] + f[s] * w0 + f[s + 1] * w1 + f[s + 2] * w2;
    }
    return out;
}

// Derivative samples: fourth order on uniform grids (five-point stencils,
// one-sided at the ends), second order otherwise.
template <typename T>
std::vector<T> differentiate(const std::vector<double>& grid, const std::vector<T>& f) {
    const std::size_t n = grid.size();
    if (n < 3) throw InvalidArgument("quadrature", "differentiation needs at least three grid points");
    std::vector<T> d(n);
    if (n >= 5 && is_uniform(grid)) {
        const double h = (grid.back() - grid.front()) / static_cast<double>(n - 1);
        for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (f[i - 2] - f[i - 1] * 8.0 + f[i + 1] * 8.0 - f[i + 2]) * (1.0 / (12.0 * h));
        auto forward = [&](std::size_t i) {
            return (f[i] * -25.0 + f[i + 1] * 48.0 - f[i + 2] * 36.0 + f[i + 3] * 16.0 - f[i + 4] * 3.0) * (1.0 / (12.0 * h));
        };
        auto skewed = [&](std::size_t i) {
            return (f[i - 1] * -3.0 - f[i] * 10.0 + f[i + 1] * 18.0 - f[i + 2] * 6.0 + f[i + 3]) * (1.0 / (12.0 * h));
        };
        d[0] = forward(0);
        d[1] = skewed(1);
        const std::size_t m = n - 1;
        // Mirror stencils at the right end.
        d[m] = (f[m] * 25.0 - f[m - 1] * 48.0 + f[m - 2] * 36.0 - f[m - 3] * 16.0 + f[m - 4] * 3.0) * (1.0 / (12.0 * h));
        d[m - 1] = (f[m] * 3.0 + f[m - 1] * 10.0 - f[m - 2] * 18.0 + f[m - 3] * 6.0 - f[m - 4]) * (1.0 / (12.0 * h));
        return d;
    }
    auto three_point = [&](std::size_t a, std::size_t at) {
        const double x0 = grid[a], x1 = grid[a + 1], x2 = grid[a + 2], x = grid[at];
        const double c0 = (2 * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
        const double c1 = (2 * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
        const double c2 = (2 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
        return f[a] * c0 + f[a + 1] * c1 + f[a + 2] * c2;
    };
    d[0] = three_point(0, 0);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = three_point(i - 1, i);
    d[n - 1] = three_point(n - 3, n - 1);
    return d;
}

// Integral of f over [a, b] with composite Gauss-Legendre (5 nodes per panel).
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels);

}  // namespace sforge
