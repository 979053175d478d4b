#include "sforge/quadrature.hpp"

namespace sforge {

bool is_uniform(const std::vector<double>& grid, double rel_tol) {
    if (grid.size() < 3) return true;
    const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (std::abs(grid[i] - grid[i - 1] - h) > rel_tol * std::abs(h) + 1e-15 * std::abs(grid[i])) return false;
    }
    return true;
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels) {
    static const double nodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
    static const double weights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                      0.2369268850561891};
    if (panels < 1) panels = 1;
    const double w = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * w;
        double s = 0.0;
        for (int k = 0; k < 5; ++k) s += weights[k] * f(mid + 0.5 * w * nodes[k]);
        total += 0.5 * w * s;
    }
    return total;
}

}  // namespace sforge
