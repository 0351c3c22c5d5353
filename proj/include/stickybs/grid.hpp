#pragma once
// Price-grid construction: log-spaced nodes with the sticky level inserted
// exactly, plus optional local refinement windows.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace stickybs {

// n log-spaced nodes on [lo, hi]; the interior node nearest zeta (in log
// distance) is replaced by exactly zeta so the interface sits on the grid.
inline std::vector<double> make_log_grid(double lo, double hi, std::size_t n, double zeta) {
    if (!(lo > 0.0 && lo < zeta && zeta < hi)) throw std::invalid_argument("grid must bracket zeta, lo > 0");
    if (n < 5) throw std::invalid_argument("grid needs at least 5 nodes");
    std::vector<double> g(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
    g.front() = lo;
    g.back() = hi;
    std::size_t jb = 1;
    double best = std::abs(std::log(g[1] / zeta));
    for (std::size_t i = 2; i + 1 < n; ++i) {
        double d = std::abs(std::log(g[i] / zeta));
        if (d < best) { best = d; jb = i; }
    }
    g[jb] = zeta;
    for (std::size_t i = 1; i < n; ++i)
        if (!(g[i] > g[i - 1])) throw std::logic_error("grid construction failed to stay increasing");
    return g;
}

namespace detail {

// Index of the grid node nearest to s0 (ties go left).
inline std::size_t snap_to_grid(const std::vector<double>& grid, double s0) {
    auto it = std::lower_bound(grid.begin(), grid.end(), s0);
    if (it == grid.end()) return grid.size() - 1;
    std::size_t i = static_cast<std::size_t>(it - grid.begin());
    if (i == 0) return 0;
    return (s0 - grid[i - 1] <= grid[i] - s0) ? i - 1 : i;
}

}  // namespace detail

// Ensure at least min_inside existing-or-new nodes lie strictly inside
// (c - w, c + w) by merging in uniformly spaced ones; keeps all input nodes.
inline std::vector<double> refine_window(std::vector<double> g, double c, double w, std::size_t min_inside) {
    if (!(w > 0.0)) throw std::invalid_argument("refine_window: nonpositive width");
    auto inside = [&](double x) { return x > c - w && x < c + w; };
    std::size_t have = 0;
    for (double x : g) have += inside(x) ? 1 : 0;
    if (have >= min_inside) return g;
    std::sort(g.begin(), g.end());
    const std::size_t add = 2 * min_inside;  // uniform fill; originals win near-collisions
    const double tol = 0.02 * (2.0 * w) / static_cast<double>(add);
    std::vector<double> out = g;
    for (std::size_t i = 0; i < add; ++i) {
        double x = c - w + 2.0 * w * (static_cast<double>(i) + 0.5) / static_cast<double>(add);
        auto it = std::lower_bound(g.begin(), g.end(), x);
        double nearest = std::numeric_limits<double>::infinity();
        if (it != g.end()) nearest = std::min(nearest, std::abs(*it - x));
        if (it != g.begin()) nearest = std::min(nearest, std::abs(*(it - 1) - x));
        if (nearest > tol) out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace stickybs
