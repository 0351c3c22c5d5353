#pragma once

// Backward finite-difference pricer.  Away from the sticky level the value
// solves the driftless Black-Scholes equation v_t = -(sigma^2 x^2 / 2) v_xx;
// at the sticky node the discrete equation enforces the interface condition
//   v_t(t, zeta) = -(1/rho) * (v_x(t, zeta+) - v_x(t, zeta-))
// with three-point one-sided difference quotients on each side, so the scheme
// is a pentadiagonal system: tridiagonal everywhere except one row of
// bandwidth 2.  (The 1/rho weight is the generator at the atom: the sticky
// atom carries speed mass rho/s'(zeta), the same normalization that makes
// occupation = rho * local time hold on simulated paths.)  Far-field rows
// impose zero curvature (linear extrapolation).  Time stepping is a theta
// scheme started with implicit half-steps to damp the payoff kink (Rannacher
// smoothing).
//
// The mollified variant replaces the atom by a narrow well in the local
// volatility: 1/(sigma_n(x)^2 x^2) = 1/(sigma^2 x^2) + (rho/2) * bump(x) with
// a C^2 bump of unit integral on [zeta - eps, zeta + eps]; the well carries
// the atom's speed-measure mass (rho/2 in the half-normalized density used
// off the atom, i.e. full mass rho), and the surface is smooth in x.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "stickybs/csv.hpp"
#include "stickybs/grid.hpp"
#include "stickybs/model.hpp"

namespace stickybs {

struct GridSpec {
    std::vector<double> x_nodes;  // increasing, positive; zeta should be a node
    int t_steps = 2000;
    double theta = 0.5;       // 0 explicit, 1 implicit, 0.5 trapezoidal
    int rannacher_steps = 2;  // leading full steps replaced by implicit half-steps
};

inline GridSpec default_pricing_grid(const ModelParams& p, int n_nodes = 1001, double width = 16.0) {
    GridSpec g;
    g.x_nodes = make_log_grid(p.zeta / width, p.zeta * width, n_nodes, p.zeta);
    return g;
}

struct DeltaPair {
    double left = 0.0;
    double right = 0.0;
};

namespace detail {

// First-derivative weights at x0 from values at (x0, x1, x2); exact through
// quadratics, signs of the spacings arbitrary (serves one-sided and centered).
inline std::array<double, 3> deriv3_coeffs(double x0, double x1, double x2) {
    const double h1 = x1 - x0, h2 = x2 - x1;
    return {-(2.0 * h1 + h2) / (h1 * (h1 + h2)), (h1 + h2) / (h1 * h2),
            -h1 / (h2 * (h1 + h2))};
}

// Second-derivative weights at the middle node of (x_prev, x_mid, x_next).
inline std::array<double, 3> second_diff_coeffs(double x_prev, double x_mid, double x_next) {
    const double hl = x_mid - x_prev, hr = x_next - x_mid;
    return {2.0 / (hl * (hl + hr)), -2.0 / (hl * hr), 2.0 / (hr * (hl + hr))};
}

// Pentadiagonal matrix: row i holds coefficients for columns i-2 .. i+2.
struct PentaMatrix {
    std::size_t n = 0;
    std::vector<std::array<double, 5>> rows;

    explicit PentaMatrix(std::size_t size) : n(size), rows(size, {0, 0, 0, 0, 0}) {}

    double& at(std::size_t i, std::size_t j) { return rows[i][j + 2 - i]; }

    void apply(const std::vector<double>& v, std::vector<double>& out) const {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            const std::size_t jlo = i >= 2 ? i - 2 : 0;
            const std::size_t jhi = std::min(i + 2, n - 1);
            for (std::size_t j = jlo; j <= jhi; ++j) s += rows[i][j + 2 - i] * v[j];
            out[i] = s;
        }
    }
};

// LU factorization of a pentadiagonal matrix with partial pivoting (row
// interchanges stay within the lower bandwidth, upper bandwidth widens by 2).
class BandedLU {
  public:
    explicit BandedLU(const PentaMatrix& a)
        : n_(static_cast<int>(a.n)), w_(a.n * kStride, 0.0), piv_(a.n) {
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < 5; ++k) {
                int j = i + k - 2;
                if (0 <= j && j < n_) at(i, j) = a.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            }
        factor();
    }

    void solve(std::vector<double>& b) const {
        for (int k = 0; k < n_; ++k) {
            if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
            const int imax = std::min(k + kKl, n_ - 1);
            for (int i = k + 1; i <= imax; ++i) b[i] -= at(i, k) * b[k];
        }
        for (int k = n_ - 1; k >= 0; --k) {
            const int jmax = std::min(k + kKl + kKu, n_ - 1);
            double s = b[k];
            for (int j = k + 1; j <= jmax; ++j) s -= at(k, j) * b[j];
            b[k] = s / at(k, k);
        }
    }

  private:
    static constexpr int kKl = 2, kKu = 2, kStride = 2 * kKl + kKu + 1;
    int n_;
    std::vector<double> w_;
    std::vector<int> piv_;

    double& at(int i, int j) { return w_[static_cast<std::size_t>(i) * kStride + (j - i + kKl)]; }
    double at(int i, int j) const { return w_[static_cast<std::size_t>(i) * kStride + (j - i + kKl)]; }

    void factor() {
        for (int k = 0; k < n_; ++k) {
            const int imax = std::min(k + kKl, n_ - 1);
            int p = k;
            double best = std::abs(at(k, k));
            for (int i = k + 1; i <= imax; ++i)
                if (std::abs(at(i, k)) > best) { best = std::abs(at(i, k)); p = i; }
            piv_[k] = p;
            const int jmax = std::min(k + kKl + kKu, n_ - 1);
            if (p != k)
                for (int j = k; j <= jmax; ++j) std::swap(at(k, j), at(p, j));
            const double pivot = at(k, k);
            if (pivot == 0.0) throw std::runtime_error("pde: singular system (degenerate grid?)");
            for (int i = k + 1; i <= imax; ++i) {
                const double l = at(i, k) / pivot;
                at(i, k) = l;
                for (int j = k + 1; j <= jmax; ++j) at(i, j) -= l * at(k, j);
            }
        }
    }
};

// The spatial operator L: interior rows are diffusion second differences
// scaled by c_j = sigma_j^2 x_j^2 / 2; the sticky row (when enabled) is the
// derivative-jump operator (1/rho) (D+ - D-); boundary rows are zero here
// and replaced by the zero-curvature closure in the implicit matrix.
struct SpatialOperator {
    PentaMatrix L;
    std::array<double, 3> closure_lo{};  // coefficients on v0, v1, v2
    std::array<double, 3> closure_hi{};  // coefficients on v_{n-3}, v_{n-2}, v_{n-1}

    explicit SpatialOperator(std::size_t n) : L(n) {}
};

inline SpatialOperator build_operator(const std::vector<double>& x, const std::vector<double>& c,
                                      bool interface_row, double rho, std::size_t zi) {
    const std::size_t n = x.size();
    SpatialOperator op(n);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        if (interface_row && j == zi) {
            const auto right = deriv3_coeffs(x[j], x[j + 1], x[j + 2]);
            const auto left = deriv3_coeffs(x[j], x[j - 1], x[j - 2]);
            const double w = 1.0 / rho;
            op.L.at(j, j - 2) = -w * left[2];
            op.L.at(j, j - 1) = -w * left[1];
            op.L.at(j, j) = w * (right[0] - left[0]);
            op.L.at(j, j + 1) = w * right[1];
            op.L.at(j, j + 2) = w * right[2];
        } else {
            const auto d2 = second_diff_coeffs(x[j - 1], x[j], x[j + 1]);
            op.L.at(j, j - 1) = c[j] * d2[0];
            op.L.at(j, j) = c[j] * d2[1];
            op.L.at(j, j + 1) = c[j] * d2[2];
        }
    }
    const double kap_lo = (x[1] - x[0]) / (x[2] - x[1]);
    op.closure_lo = {1.0, -(1.0 + kap_lo), kap_lo};
    // (v_{n-1} - v_{n-2})/h_last = (v_{n-2} - v_{n-3})/h_prev
    const double kap_hi = (x[n - 1] - x[n - 2]) / (x[n - 2] - x[n - 3]);
    op.closure_hi = {kap_hi, -(1.0 + kap_hi), 1.0};
    return op;
}

struct SteppingPair {
    PentaMatrix impl;
    PentaMatrix expl;
    BandedLU lu;

    SteppingPair(const SpatialOperator& op, double theta, double dtau)
        : impl(make_impl(op, theta, dtau)), expl(make_expl(op, theta, dtau)), lu(impl) {}

    static PentaMatrix make_impl(const SpatialOperator& op, double theta, double dtau) {
        const std::size_t n = op.L.n;
        PentaMatrix m(n);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            for (int k = 0; k < 5; ++k) m.rows[i][static_cast<std::size_t>(k)] = -theta * dtau * op.L.rows[i][static_cast<std::size_t>(k)];
            m.at(i, i) += 1.0;
        }
        for (int k = 0; k < 3; ++k) {
            m.at(0, static_cast<std::size_t>(k)) = op.closure_lo[static_cast<std::size_t>(k)];
            m.at(n - 1, n - 3 + static_cast<std::size_t>(k)) = op.closure_hi[static_cast<std::size_t>(k)];
        }
        return m;
    }

    static PentaMatrix make_expl(const SpatialOperator& op, double theta, double dtau) {
        const std::size_t n = op.L.n;
        PentaMatrix m(n);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            for (int k = 0; k < 5; ++k) m.rows[i][static_cast<std::size_t>(k)] = (1.0 - theta) * dtau * op.L.rows[i][static_cast<std::size_t>(k)];
            m.at(i, i) += 1.0;
        }
        // boundary rows stay zero: the closure is enforced exactly at the new level
        return m;
    }
};

}  // namespace detail

struct PriceSurface {
    GridSpec grid;
    double maturity = 0.0;
    double zeta = 0.0;
    std::size_t zeta_index = 0;   // node used for the one-sided derivative records
    bool sticky_interface = false;  // whether the interface row was active
    // values[t_index][x_index]; t_index 0 is t = 0, last is t = T (the payoff)
    std::vector<std::vector<double>> values;
    std::vector<double> dx_left_at_zeta;   // per t_index, v_x(t, zeta-)
    std::vector<double> dx_right_at_zeta;  // per t_index, v_x(t, zeta+)

    double value(double t, double x) const {
        const auto [k0, k1, wt] = time_weights(t);
        return (1.0 - wt) * row_value(values[k0], x) + wt * row_value(values[k1], x);
    }

    // Left/right price derivative at (t, x).  Equal components away from the
    // sticky node; at x == zeta exactly, the recorded one-sided pair.  Queries
    // beyond the grid extrapolate linearly, matching the far-field closure.
    DeltaPair delta_at(double t, double x) const {
        const auto [k0, k1, wt] = time_weights(t);
        DeltaPair a = row_delta(k0, x), b = row_delta(k1, x);
        return {(1.0 - wt) * a.left + wt * b.left, (1.0 - wt) * a.right + wt * b.right};
    }

  private:
    std::tuple<std::size_t, std::size_t, double> time_weights(double t) const {
        const double tol = 1e-9 * std::max(1.0, maturity);
        if (!(t >= -tol && t <= maturity + tol))
            throw std::out_of_range("PriceSurface: time query outside [0, maturity]");
        double s = std::clamp(t / maturity, 0.0, 1.0) * grid.t_steps;
        std::size_t k0 = std::min(static_cast<std::size_t>(s), static_cast<std::size_t>(grid.t_steps));
        std::size_t k1 = std::min(k0 + 1, static_cast<std::size_t>(grid.t_steps));
        return {k0, k1, std::clamp(s - static_cast<double>(k0), 0.0, 1.0)};
    }

    double row_value(const std::vector<double>& v, double x) const {
        if (!(x > 0.0)) throw std::domain_error("PriceSurface: query at nonpositive price");
        const auto& xs = grid.x_nodes;
        const std::size_t n = xs.size();
        if (x <= xs.front())
            return v[0] + (v[1] - v[0]) / (xs[1] - xs[0]) * (x - xs[0]);
        if (x >= xs.back())
            return v[n - 1] + (v[n - 1] - v[n - 2]) / (xs[n - 1] - xs[n - 2]) * (x - xs[n - 1]);
        const std::size_t j = segment_of(x);
        const double w = (x - xs[j]) / (xs[j + 1] - xs[j]);
        return v[j] * (1.0 - w) + v[j + 1] * w;
    }

    DeltaPair row_delta(std::size_t k, double x) const {
        const auto& xs = grid.x_nodes;
        const std::size_t n = xs.size();
        const std::vector<double>& v = values[k];
        if (!(x > 0.0)) throw std::domain_error("PriceSurface: query at nonpositive price");
        if (x == zeta && sticky_interface) return {dx_left_at_zeta[k], dx_right_at_zeta[k]};
        if (x <= xs.front()) {
            double d = (v[1] - v[0]) / (xs[1] - xs[0]);
            return {d, d};
        }
        if (x >= xs.back()) {
            double d = (v[n - 1] - v[n - 2]) / (xs[n - 1] - xs[n - 2]);
            return {d, d};
        }
        const std::size_t j = segment_of(x);
        const double w = (x - xs[j]) / (xs[j + 1] - xs[j]);
        const double dl = node_delta(k, j, /*from_right=*/true);
        const double dr = node_delta(k, j + 1, /*from_right=*/false);
        const double d = dl * (1.0 - w) + dr * w;
        return {d, d};
    }

    // Nodal derivative; at the sticky node, pick the side facing the query.
    double node_delta(std::size_t k, std::size_t j, bool from_right) const {
        const auto& xs = grid.x_nodes;
        const std::size_t n = xs.size();
        if (sticky_interface && j == zeta_index)
            return from_right ? dx_right_at_zeta[k] : dx_left_at_zeta[k];
        const std::vector<double>& v = values[k];
        if (j == 0) return (v[1] - v[0]) / (xs[1] - xs[0]);
        if (j == n - 1) return (v[n - 1] - v[n - 2]) / (xs[n - 1] - xs[n - 2]);
        const auto co = detail::deriv3_coeffs(xs[j], xs[j + 1], xs[j - 1]);
        return co[0] * v[j] + co[1] * v[j + 1] + co[2] * v[j - 1];
    }

    std::size_t segment_of(double x) const {
        const auto& xs = grid.x_nodes;
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t j = static_cast<std::size_t>(it - xs.begin());
        return std::min(std::max<std::size_t>(j, 1) - 1, xs.size() - 2);
    }
};

namespace detail {

inline void validate_grid(const GridSpec& g) {
    if (g.x_nodes.size() < 7) throw std::invalid_argument("pde: grid needs at least 7 nodes");
    if (!(g.x_nodes.front() > 0.0)) throw std::invalid_argument("pde: grid must be positive");
    for (std::size_t i = 1; i < g.x_nodes.size(); ++i)
        if (!(g.x_nodes[i] > g.x_nodes[i - 1]))
            throw std::invalid_argument("pde: grid must be strictly increasing");
    if (g.t_steps < 1) throw std::invalid_argument("pde: t_steps must be >= 1");
    if (!(g.theta >= 0.0 && g.theta <= 1.0)) throw std::invalid_argument("pde: theta must be in [0, 1]");
    if (g.rannacher_steps < 0) throw std::invalid_argument("pde: rannacher_steps must be >= 0");
}

// Core backward march shared by the sticky and the mollified solver.
inline std::vector<std::vector<double>> solve_backward(const GridSpec& g,
                                                       const std::vector<double>& c,
                                                       bool interface_row, double rho,
                                                       std::size_t zi,
                                                       std::vector<double> payoff_values,
                                                       double T) {
    const std::size_t n = g.x_nodes.size();
    const int steps = g.t_steps;
    const double dtau = T / steps;
    SpatialOperator op = build_operator(g.x_nodes, c, interface_row, rho, zi);

    const int rann = std::min(g.rannacher_steps, steps);
    std::vector<std::vector<double>> values(static_cast<std::size_t>(steps) + 1);
    values[static_cast<std::size_t>(steps)] = payoff_values;

    std::vector<double> v = std::move(payoff_values);
    std::vector<double> rhs(n);

    if (rann > 0) {
        SteppingPair half(op, 1.0, 0.5 * dtau);
        for (int m = 1; m <= rann; ++m) {
            for (int s = 0; s < 2; ++s) {
                half.expl.apply(v, rhs);
                half.lu.solve(rhs);
                v = rhs;
            }
            values[static_cast<std::size_t>(steps - m)] = v;
        }
    }
    if (rann < steps) {
        SteppingPair full(op, g.theta, dtau);
        for (int m = rann + 1; m <= steps; ++m) {
            full.expl.apply(v, rhs);
            full.lu.solve(rhs);
            v = rhs;
            values[static_cast<std::size_t>(steps - m)] = v;
        }
    }
    return values;
}

}  // namespace detail

namespace detail {

inline PriceSurface make_surface(GridSpec g, double T, double zeta, std::size_t zi,
                                 bool interface_row, std::vector<std::vector<double>> vals) {
    PriceSurface s;
    s.grid = std::move(g);
    s.maturity = T;
    s.zeta = zeta;
    s.zeta_index = zi;
    s.sticky_interface = interface_row;
    s.values = std::move(vals);
    const auto& x = s.grid.x_nodes;
    const std::size_t levels = s.values.size();
    s.dx_left_at_zeta.resize(levels);
    s.dx_right_at_zeta.resize(levels);
    const auto right = detail::deriv3_coeffs(x[zi], x[zi + 1], x[zi + 2]);
    const auto left = detail::deriv3_coeffs(x[zi], x[zi - 1], x[zi - 2]);
    for (std::size_t k = 0; k < levels; ++k) {
        const auto& v = s.values[k];
        s.dx_right_at_zeta[k] = right[0] * v[zi] + right[1] * v[zi + 1] + right[2] * v[zi + 2];
        s.dx_left_at_zeta[k] = left[0] * v[zi] + left[1] * v[zi - 1] + left[2] * v[zi - 2];
    }
    return s;
}

}  // namespace detail

// Sticky pricing solve.  Parameters are taken as risk-neutral data (mu is
// ignored; the pricing measure is driftless); r must be zero, since no
// arbitrage-free pricing rule exists otherwise.
inline PriceSurface solve_pricing(const ModelParams& params, const Payoff& payoff,
                                  const GridSpec& grid, double T) {
    validate(params);
    if (params.r != 0.0) throw std::invalid_argument("solve_pricing: requires r = 0");
    if (!(T > 0.0)) throw std::invalid_argument("solve_pricing: maturity must be positive");
    detail::validate_grid(grid);
    const auto& x = grid.x_nodes;
    const std::size_t n = x.size();

    auto zit = std::lower_bound(x.begin(), x.end(), params.zeta);
    const bool zeta_on_grid = zit != x.end() && *zit == params.zeta;
    std::size_t zi;
    if (zeta_on_grid) {
        zi = static_cast<std::size_t>(zit - x.begin());
    } else if (params.rho > 0.0) {
        throw std::invalid_argument("solve_pricing: zeta must be a grid node when rho > 0");
    } else {
        zi = detail::snap_to_grid(x, params.zeta);  // derivative records only
    }
    zi = std::min(std::max<std::size_t>(zi, 2), n - 3);
    const bool interface_row = params.rho > 0.0;

    std::vector<double> terminal(n);
    for (std::size_t j = 0; j < n; ++j) {
        terminal[j] = eval_payoff(payoff, x[j]);
        if (!std::isfinite(terminal[j]))
            throw std::invalid_argument("solve_pricing: payoff is not finite at grid node " +
                                        std::to_string(x[j]));
    }
    std::vector<double> c(n);
    for (std::size_t j = 0; j < n; ++j) c[j] = 0.5 * params.sigma * params.sigma * x[j] * x[j];

    auto vals = detail::solve_backward(grid, c, interface_row, params.rho, zi, std::move(terminal), T);
    return detail::make_surface(grid, T, params.zeta, zi, interface_row, std::move(vals));
}

inline DeltaPair delta(const PriceSurface& surface, double t, double x) {
    return surface.delta_at(t, x);
}

// ---------------------------------------------------------------------------
// Mollified (smooth local-volatility) approximation.

struct MollifiedModel {
    int n = 1;
    double support_width = 0.0;  // eps_n = zeta / (4n)
    double sigma = 0.0;
    double rho = 0.0;
    double zeta = 0.0;

    // C^2 bump of unit integral on the window; the added speed density is
    // (rho/2) * bump in the same half-normalization as 1/(sigma^2 x^2).
    double speed_bump(double x) const {
        const double u = (x - zeta) / support_width;
        if (rho == 0.0 || std::abs(u) >= 1.0) return 0.0;
        const double q = 1.0 - u * u;
        return (35.0 / 32.0) * q * q * q / support_width;
    }

    double sigma_n(double x) const {
        const double b = speed_bump(x);
        if (b == 0.0) return sigma;  // outside the window (or rho = 0): untouched
        const double speed = 1.0 / (sigma * sigma * x * x) + 0.5 * rho * b;
        return 1.0 / (x * std::sqrt(speed));
    }
};

inline MollifiedModel mollify(const ModelParams& params, int n) {
    validate(params);
    if (n < 1) throw std::invalid_argument("mollify: index n must be >= 1");
    MollifiedModel m;
    m.n = n;
    m.support_width = params.zeta / (4.0 * n);
    m.sigma = params.sigma;
    m.rho = params.rho;
    m.zeta = params.zeta;
    return m;
}

// Widen a grid so the mollification window holds at least min_inside nodes.
inline GridSpec resolve_window(GridSpec grid, const MollifiedModel& model, int min_inside = 16) {
    grid.x_nodes = refine_window(std::move(grid.x_nodes), model.zeta, model.support_width,
                                 static_cast<std::size_t>(min_inside));
    return grid;
}

inline PriceSurface solve_smooth(const MollifiedModel& model, const Payoff& payoff,
                                 const GridSpec& grid, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("solve_smooth: maturity must be positive");
    detail::validate_grid(grid);
    const auto& x = grid.x_nodes;
    const std::size_t n = x.size();

    if (model.rho > 0.0) {
        std::size_t inside = 0;
        for (double xi : x)
            if (xi > model.zeta - model.support_width && xi < model.zeta + model.support_width)
                ++inside;
        if (inside < 8)
            throw std::invalid_argument(
                "solve_smooth: mollification window holds " + std::to_string(inside) +
                " nodes; need >= 8 (refine the grid near the sticky level)");
    }
    std::size_t zi = detail::snap_to_grid(x, model.zeta);
    zi = std::min(std::max<std::size_t>(zi, 2), n - 3);

    std::vector<double> terminal(n);
    for (std::size_t j = 0; j < n; ++j) {
        terminal[j] = eval_payoff(payoff, x[j]);
        if (!std::isfinite(terminal[j]))
            throw std::invalid_argument("solve_smooth: payoff is not finite at grid node " +
                                        std::to_string(x[j]));
    }
    std::vector<double> c(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double s = model.sigma_n(x[j]);
        c[j] = 0.5 * s * s * x[j] * x[j];
    }
    auto vals = detail::solve_backward(grid, c, /*interface_row=*/false, 0.0, zi, std::move(terminal), T);
    return detail::make_surface(grid, T, model.zeta, zi, /*interface_row=*/false, std::move(vals));
}

// Long-format surface export: t,x,v,dv_left,dv_right (strides subsample the
// output; the first and last levels/nodes are always included).
inline void write_surface_csv(const PriceSurface& s, std::ostream& os, int t_stride = 1,
                              int x_stride = 1) {
    if (t_stride < 1 || x_stride < 1) throw std::invalid_argument("write_surface_csv: strides must be >= 1");
    os << "t,x,v,dv_left,dv_right\n";
    const auto& xs = s.grid.x_nodes;
    const std::size_t levels = s.values.size();
    auto strided = [](std::size_t count, int stride) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < count; i += static_cast<std::size_t>(stride)) idx.push_back(i);
        if (idx.back() != count - 1) idx.push_back(count - 1);
        return idx;
    };
    const auto klist = strided(levels, t_stride);
    const auto jlist = strided(xs.size(), x_stride);
    for (std::size_t k : klist) {
        const double t = s.maturity * static_cast<double>(k) / static_cast<double>(levels - 1);
        for (std::size_t j : jlist) {
            DeltaPair d = s.delta_at(t, xs[j]);
            os << fmt_num(t) << ',' << fmt_num(xs[j]) << ',' << fmt_num(s.values[k][j]) << ','
               << fmt_num(d.left) << ',' << fmt_num(d.right) << '\n';
        }
    }
}

}  // namespace stickybs
