#pragma once

// Path generation for the sticky model by two independent schemes:
//
//  1. time_change_sticky — simulate the plain GBM Z, accumulate its local time
//     at zeta, build the additive clock A(t) = t + (rho/2)*Ltan_t(Z), and read
//     the sticky path off the right-inverse of A.  Flat stretches of the
//     inverse are exactly the intervals the sticky path spends at zeta.
//
// On normalization: the model equation 1{S=zeta}dt = rho dL pairs rho with the
// local time in the speed-measure normalization (occupation densities taken
// against m, so the sticky atom has mass exactly rho/s'(zeta)).  That L is
// HALF the symmetric Tanaka local time of the price path.  The raw estimator
// local_time_series below stays in the standard Tanaka normalization (for a
// Brownian path its mean is E|B_T| = sqrt(2T/pi)); the local_time_zeta fields
// of generated sticky paths report the model's L, so occupation = rho * L
// holds pathwise by construction.
//
//  2. simulate_stmca — a random walk on a fixed price grid whose jump
//     probabilities come from the natural scale and whose (deterministic)
//     holding times come from the Green's function of the two-sided exit
//     problem integrated against the speed measure.  The sticky atom at zeta
//     shows up as extra holding time at that node and nowhere else.
//
// The two schemes share no code paths, which is the point: each one checks
// the other's terminal law in the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stickybs/grid.hpp"
#include "stickybs/model.hpp"
#include "stickybs/path.hpp"
#include "stickybs/rng.hpp"

namespace stickybs {

namespace defaults {
inline constexpr int n_base_steps = 10000;   // base-grid steps for hedging-grade paths
inline constexpr int n_base_pricing = 4000;  // base-grid steps for terminal-law sampling
inline constexpr int n_out = 2000;           // output samples per path
inline constexpr int chain_nodes = 1001;     // STMCA grid size
inline constexpr double chain_lo_mult = 1.0 / 32.0;  // grid support [zeta/32, 32*zeta]
inline constexpr double chain_hi_mult = 32.0;
}  // namespace defaults

inline double sgn0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Running discrete-Tanaka estimate of the local time of `values` at `level`:
//   L_k = |S_k - level| - |S_0 - level| - sum_{i<k} sgn(S_i - level) (S_{i+1} - S_i).
// Every increment is >= 0 exactly (0 while the sign is constant, 2|S_{i+1}-level|
// on a crossing, |S_{i+1}-level| when leaving the level itself); the max() below
// only guards round-off.
inline std::vector<double> local_time_series(const std::vector<double>& values, double level) {
    std::vector<double> out(values.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        double inc = std::abs(values[i] - level) - std::abs(values[i - 1] - level)
                     - sgn0(values[i - 1] - level) * (values[i] - values[i - 1]);
        acc += std::max(inc, 0.0);
        out[i] = acc;
    }
    return out;
}

inline std::vector<double> estimate_local_time(const PathSample& path, double zeta) {
    return local_time_series(path.values, zeta);
}

// Exact lognormal recursion on an arbitrary increasing time grid. Only valid
// for rho = 0; the sticky schemes below handle rho > 0.
inline PathSample simulate_gbm_exact(const ModelParams& params, double s0,
                                     std::vector<double> times, std::uint64_t seed) {
    validate(params);
    if (params.rho != 0.0) throw std::invalid_argument("simulate_gbm_exact: rho != 0, use sticky scheme");
    if (s0 <= 0.0) throw std::invalid_argument("simulate_gbm_exact: s0 must be positive");
    if (times.empty() || times.front() != 0.0)
        throw std::invalid_argument("simulate_gbm_exact: times must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("simulate_gbm_exact: times must be strictly increasing");

    PathRng rng(seed);
    PathSample path;
    path.seed = seed;
    path.scheme = Scheme::gbm_exact;
    path.times = std::move(times);
    path.values.resize(path.times.size());
    path.values[0] = s0;
    const double drift = params.mu - 0.5 * params.sigma * params.sigma;
    for (std::size_t i = 1; i < path.times.size(); ++i) {
        double dt = path.times[i] - path.times[i - 1];
        path.values[i] = path.values[i - 1]
                         * std::exp(drift * dt + params.sigma * std::sqrt(dt) * rng.normal());
    }
    path.local_time_zeta = local_time_series(path.values, params.zeta);
    for (double& v : path.local_time_zeta) v *= 0.5;  // model (speed) normalization
    path.occupation_zeta.assign(path.times.size(), 0.0);
    return path;
}

// The additive clock A(t) = t + (rho/2)*Ltan_t(Z) sampled on the base grid,
// plus the leftmost-index right inverse used to read the sticky path off the
// base path.  (Ltan is the Tanaka-normalized estimate; the factor 1/2 converts
// it to the speed-normalized local time the model equation pairs with rho.)
struct TimeChange {
    std::vector<double> base_times;
    std::vector<double> A_values;
    double rho = 0.0;

    // Leftmost index i with A_values[i] >= u.  u must not exceed A_values.back().
    std::size_t gamma_index(double u) const {
        auto it = std::lower_bound(A_values.begin(), A_values.end(), u);
        if (it == A_values.end()) throw std::out_of_range("TimeChange: u beyond clock range");
        return static_cast<std::size_t>(it - A_values.begin());
    }
};

inline TimeChange make_time_change(const std::vector<double>& base_times,
                                   const std::vector<double>& tanaka_local_time, double rho) {
    if (base_times.size() != tanaka_local_time.size())
        throw std::invalid_argument("make_time_change: array length mismatch");
    TimeChange tc;
    tc.rho = rho;
    tc.base_times = base_times;
    tc.A_values.resize(base_times.size());
    for (std::size_t i = 0; i < base_times.size(); ++i)
        tc.A_values[i] = base_times[i] + 0.5 * rho * tanaka_local_time[i];
    return tc;
}

namespace detail {

// Shared core of the time-change scheme: the base GBM path, its local time at
// zeta, and the clock.  Path and terminal samplers differ only in what they
// read off this state.
struct TimeChangeState {
    std::vector<double> z;   // base GBM on the uniform base grid
    std::vector<double> t;   // base times
    std::vector<double> lt;  // running Tanaka local time of z at zeta
    std::vector<double> A;   // A(t_i) = t_i + (rho/2) * lt_i
};

inline TimeChangeState run_time_change_base(const ModelParams& params, double s0,
                                            double horizon, int n_base_steps,
                                            std::uint64_t seed) {
    validate(params);
    if (s0 <= 0.0) throw std::invalid_argument("time_change_sticky: s0 must be positive");
    if (horizon <= 0.0) throw std::invalid_argument("time_change_sticky: horizon must be positive");
    if (n_base_steps < 2) throw std::invalid_argument("time_change_sticky: n_base_steps < 2");

    const std::size_t n = static_cast<std::size_t>(n_base_steps);
    TimeChangeState st;
    st.t.resize(n + 1);
    st.z.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
        st.t[i] = horizon * (static_cast<double>(i) / static_cast<double>(n));

    PathRng rng(seed);
    const double dt = horizon / static_cast<double>(n);
    const double drift = (params.mu - 0.5 * params.sigma * params.sigma) * dt;
    const double vol = params.sigma * std::sqrt(dt);
    st.z[0] = s0;
    for (std::size_t i = 1; i <= n; ++i)
        st.z[i] = st.z[i - 1] * std::exp(drift + vol * rng.normal());

    st.lt = local_time_series(st.z, params.zeta);
    st.A.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) st.A[i] = st.t[i] + 0.5 * params.rho * st.lt[i];
    return st;
}

// Resolve the sticky path at clock time u from the base state.  Within base
// step i the clock spends dt_i on the diffusion part first, then sticks at
// zeta for the remainder; a query landing in the overhang reads exactly
// zeta, which keeps the terminal atom of the sticky law an atom (and makes
// "the path is at zeta" an exact float comparison downstream).  Mid-step
// queries emit the last fully reached base node (sample-and-hold) rather
// than an interpolated value: interpolation would mix the not-yet-realized
// increment into the sample, which visibly biases statistics re-estimated
// from the values, e.g. the Tanaka local time.  The held sample is still
// mildly informed near zeta (whether the in-progress step has finished
// depends on its stick time), an O(sqrt(dt)) effect per sample that cancels
// for smooth functionals but not for hedges whose delta jumps at zeta —
// hedging experiments therefore simulate on the Markov chain instead, whose
// piecewise-constant paths sample exactly (see hedge.hpp).
struct TimeChangePoint {
    double value = 0.0;
    double gamma = 0.0;  // diffusion time consumed, u - gamma = occupation
};

inline TimeChangePoint resolve_time_change(const TimeChangeState& st, double zeta, double u) {
    TimeChangePoint pt;
    auto it = std::lower_bound(st.A.begin(), st.A.end(), u);
    if (it == st.A.end()) throw std::out_of_range("time_change_sticky: query beyond clock range");
    std::size_t i = static_cast<std::size_t>(it - st.A.begin());
    if (i == 0) {
        pt.value = st.z[0];
        pt.gamma = st.t[0];
        return pt;
    }
    const double dt = st.t[i] - st.t[i - 1];
    const double stick = (st.A[i] - st.A[i - 1]) - dt;
    const double d = u - st.A[i - 1];
    if (d >= dt) {
        pt.value = stick > 0.0 ? zeta : st.z[i];  // stick overhang, or exactly at node i
        pt.gamma = st.t[i];
    } else {
        pt.value = st.z[i - 1];
        pt.gamma = st.t[i - 1] + d;
    }
    return pt;
}

}  // namespace detail

// Sticky path via the clock construction, emitted on a uniform grid of n_out
// steps over [0, horizon] (n_out <= 0 picks the library default).
inline PathSample time_change_sticky(const ModelParams& params, double s0, double horizon,
                                     int n_base_steps, std::uint64_t seed, int n_out = 0) {
    if (n_out <= 0) n_out = defaults::n_out;
    detail::TimeChangeState st =
        detail::run_time_change_base(params, s0, horizon, n_base_steps, seed);

    PathSample path;
    path.seed = seed;
    path.scheme = Scheme::time_change;
    const std::size_t m = static_cast<std::size_t>(n_out);
    path.times.resize(m + 1);
    path.values.resize(m + 1);
    path.occupation_zeta.resize(m + 1);
    path.local_time_zeta.resize(m + 1);

    double occ_prev = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
        double u = horizon * (static_cast<double>(k) / static_cast<double>(m));
        detail::TimeChangePoint pt = detail::resolve_time_change(st, params.zeta, u);
        path.times[k] = u;
        path.values[k] = pt.value;
        double occ = std::max(u - pt.gamma, occ_prev);  // monotone by construction; guard round-off
        path.occupation_zeta[k] = occ;
        occ_prev = occ;
    }
    if (params.rho > 0.0) {
        for (std::size_t k = 0; k <= m; ++k)
            path.local_time_zeta[k] = path.occupation_zeta[k] / params.rho;
    } else {
        // No time change happened; report the base-path local time at
        // gamma(u) = u, in the model's (speed) normalization = Tanaka / 2.
        for (std::size_t k = 0; k <= m; ++k) {
            double u = path.times[k];
            auto it = std::upper_bound(st.t.begin(), st.t.end(), u);
            std::size_t i = static_cast<std::size_t>(it - st.t.begin());
            if (i == 0) { path.local_time_zeta[k] = 0.0; continue; }
            if (i > st.t.size() - 1) i = st.t.size() - 1;
            double w = std::clamp((u - st.t[i - 1]) / (st.t[i] - st.t[i - 1]), 0.0, 1.0);
            path.local_time_zeta[k] = 0.5 * (st.lt[i - 1] + w * (st.lt[i] - st.lt[i - 1]));
        }
    }
    return path;
}

struct TerminalSample {
    double value = 0.0;
    double local_time = 0.0;
    double occupation = 0.0;
};

// Terminal-only variant; same law per seed as time_change_sticky's endpoint
// but skips the output-grid work.
inline TerminalSample time_change_terminal(const ModelParams& params, double s0, double horizon,
                                           int n_base_steps, std::uint64_t seed) {
    detail::TimeChangeState st =
        detail::run_time_change_base(params, s0, horizon, n_base_steps, seed);
    detail::TimeChangePoint pt = detail::resolve_time_change(st, params.zeta, horizon);
    TerminalSample out;
    out.value = pt.value;
    out.occupation = horizon - pt.gamma;
    out.local_time = params.rho > 0.0 ? out.occupation / params.rho : 0.5 * st.lt.back();
    return out;
}

// ---------------------------------------------------------------------------
// Space-time Markov chain approximation.

struct ChainSpec {
    std::vector<double> grid;       // price nodes, increasing, contains zeta exactly
    std::vector<double> up_prob;    // P(move right); 1 at the left edge, 0 at the right
    std::vector<double> hold_time;  // expected time per visit (deterministic clock)
    std::size_t zeta_index = 0;
    double atom_hold = 0.0;         // share of hold_time[zeta_index] owed to the sticky atom
};

namespace detail {

// 8-point Gauss-Legendre on [-1, 1]; the exit-time integrands below are smooth
// on each half-cell, so this is far below round-off error at our grid sizes.
inline constexpr double gl_x[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr double gl_w[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss_legendre(double a, double b, F&& f) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int k = 0; k < 8; ++k) acc += gl_w[k] * f(mid + half * gl_x[k]);
    return acc * half;
}

}  // namespace detail

// Transition data for the walk.  With the speed density normalized as
// 1/(s'(y) sigma^2 y^2), the expected exit time from (a,b) started at x is
//   E_x[tau] = 2 * \int G(x,y) speed(y) dy  +  atom_mass * G(x, zeta)
// with G on natural scale, G(x,y) = (s(x^y)-s(a))(s(b)-s(x|y))/(s(b)-s(a)).
// The factor 2 belongs to the continuous part only (it is pinned by
// E_0[tau_{(-h,h)}] = h^2 for Brownian motion); atom_mass = rho/s'(zeta) is
// already the full mass of the sticky atom in the exit-time pairing, giving
// the overhang rho*h/2 on a symmetric cell of half-width h.
// Edge nodes reflect: the walk always steps inward, and the hold uses the
// one-sided Green's function of the reflected exit problem.
inline ChainSpec build_chain(const ModelParams& params, const std::vector<double>& grid) {
    validate(params);
    if (grid.size() < 3) throw std::invalid_argument("build_chain: grid needs at least 3 nodes");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("build_chain: grid must be strictly increasing");
    if (grid.front() <= 0.0) throw std::invalid_argument("build_chain: grid must be positive");

    ChainSpec chain;
    chain.grid = grid;
    const std::size_t n = grid.size();
    chain.up_prob.assign(n, 0.0);
    chain.hold_time.assign(n, 0.0);

    auto zit = std::lower_bound(grid.begin(), grid.end(), params.zeta);
    if (zit == grid.end() || *zit != params.zeta)
        throw std::invalid_argument("build_chain: zeta is not a grid node (the interface must be a node)");
    chain.zeta_index = static_cast<std::size_t>(zit - grid.begin());

    const ScaleSpeed ss = scale_speed(params);
    auto speed = [&](double y) { return ss.speed_density(y); };

    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            // Reflecting left edge: always step up; G(x,y) = s(b) - s(max(x,y)).
            double a = grid[0], b = grid[1];
            double sb = ss.scale(b);
            chain.up_prob[0] = 1.0;
            double hold = 2.0 * detail::gauss_legendre(a, b, [&](double y) {
                return (sb - ss.scale(y)) * speed(y);
            });
            if (params.zeta >= a && params.zeta < b)
                hold += ss.atom_mass * (sb - ss.scale(std::max(grid[0], params.zeta)));
            chain.hold_time[0] = hold;
            continue;
        }
        if (i == n - 1) {
            // Reflecting right edge: always step down; G(x,y) = s(min(x,y)) - s(a).
            double a = grid[n - 2], b = grid[n - 1];
            double sa = ss.scale(a);
            chain.up_prob[n - 1] = 0.0;
            double hold = 2.0 * detail::gauss_legendre(a, b, [&](double y) {
                return (ss.scale(y) - sa) * speed(y);
            });
            if (params.zeta > a && params.zeta <= b)
                hold += ss.atom_mass * (ss.scale(std::min(grid[n - 1], params.zeta)) - sa);
            chain.hold_time[n - 1] = hold;
            continue;
        }
        double a = grid[i - 1], x = grid[i], b = grid[i + 1];
        double sa = ss.scale(a), sx = ss.scale(x), sb = ss.scale(b);
        double span = sb - sa;
        chain.up_prob[i] = (sx - sa) / span;
        double left = detail::gauss_legendre(a, x, [&](double y) {
            return (ss.scale(y) - sa) * (sb - sx) / span * speed(y);
        });
        double right = detail::gauss_legendre(x, b, [&](double y) {
            return (sx - sa) * (sb - ss.scale(y)) / span * speed(y);
        });
        double hold = 2.0 * (left + right);
        if (i == chain.zeta_index) {
            chain.atom_hold = ss.atom_mass * (sx - sa) * (sb - sx) / span;
            hold += chain.atom_hold;
        }
        chain.hold_time[i] = hold;
    }
    return chain;
}

inline ChainSpec build_chain(const ModelParams& params) {
    std::vector<double> grid =
        make_log_grid(params.zeta * defaults::chain_lo_mult, params.zeta * defaults::chain_hi_mult,
                      defaults::chain_nodes, params.zeta);
    return build_chain(params, grid);
}


// Random walk with deterministic per-node clocks, emitted right-continuously
// on a uniform output grid.  Occupation at zeta accrues at the atom's share of
// the hold; local time gains |next - zeta|/2 on each departure from zeta (half
// the discrete Tanaka increment: the fields report the model's speed-normalized
// local time, which makes occupation/local time = rho per visit in expectation).
inline PathSample simulate_stmca(const ChainSpec& chain, double s0, double horizon,
                                 std::uint64_t seed, int n_out = 0) {
    if (horizon < 0.0) throw std::invalid_argument("simulate_stmca: horizon must be nonnegative");
    if (n_out <= 0) n_out = defaults::n_out;
    const double zeta = chain.grid[chain.zeta_index];

    PathSample path;
    path.seed = seed;
    path.scheme = Scheme::stmca;
    std::size_t j = detail::snap_to_grid(chain.grid, s0);

    if (horizon == 0.0) {
        path.times = {0.0};
        path.values = {chain.grid[j]};
        path.local_time_zeta = {0.0};
        path.occupation_zeta = {0.0};
        return path;
    }

    const std::size_t m = static_cast<std::size_t>(n_out);
    path.times.resize(m + 1);
    path.values.resize(m + 1);
    path.local_time_zeta.resize(m + 1);
    path.occupation_zeta.resize(m + 1);
    for (std::size_t k = 0; k <= m; ++k)
        path.times[k] = horizon * (static_cast<double>(k) / static_cast<double>(m));

    PathRng rng(seed);
    const double zeta_share = chain.atom_hold / chain.hold_time[chain.zeta_index];
    double t = 0.0, occ = 0.0, lt = 0.0;
    std::size_t k = 0;
    while (true) {
        const double hold = chain.hold_time[j];
        const double t_leave = t + hold;
        const double share = (j == chain.zeta_index) ? zeta_share : 0.0;
        while (k <= m && path.times[k] < t_leave) {
            path.values[k] = chain.grid[j];
            path.occupation_zeta[k] = occ + share * (path.times[k] - t);
            path.local_time_zeta[k] = lt;
            ++k;
        }
        if (k > m) break;
        occ += share * hold;
        std::size_t next = (rng.uniform() < chain.up_prob[j]) ? j + 1 : j - 1;
        if (j == chain.zeta_index) lt += 0.5 * std::abs(chain.grid[next] - zeta);
        t = t_leave;
        j = next;
    }
    return path;
}

// Terminal-only walk; identical RNG consumption per seed as simulate_stmca.
inline TerminalSample stmca_terminal(const ChainSpec& chain, double s0, double horizon,
                                     std::uint64_t seed) {
    if (horizon < 0.0) throw std::invalid_argument("stmca_terminal: horizon must be nonnegative");
    const double zeta = chain.grid[chain.zeta_index];
    PathRng rng(seed);
    std::size_t j = detail::snap_to_grid(chain.grid, s0);
    double t = 0.0, occ = 0.0, lt = 0.0;
    while (t + chain.hold_time[j] <= horizon) {
        const double share = (j == chain.zeta_index)
                                 ? chain.atom_hold / chain.hold_time[chain.zeta_index]
                                 : 0.0;
        occ += share * chain.hold_time[j];
        std::size_t next = (rng.uniform() < chain.up_prob[j]) ? j + 1 : j - 1;
        if (j == chain.zeta_index) lt += 0.5 * std::abs(chain.grid[next] - zeta);
        t += chain.hold_time[j];
        j = next;
    }
    TerminalSample out;
    out.value = chain.grid[j];
    if (j == chain.zeta_index)
        occ += (chain.atom_hold / chain.hold_time[chain.zeta_index]) * (horizon - t);
    out.occupation = occ;
    out.local_time = lt;
    return out;
}

}  // namespace stickybs
