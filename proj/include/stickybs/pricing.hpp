#pragma once

// Pricing layer: the closed-form Black-Scholes reference (r = 0), Monte Carlo
// pricing under the equivalent martingale measure, and numerical verification
// of the two structural results the hedging analysis leans on -- price
// monotonicity in (rho, T) for convex payoffs, and the eventual-in-y
// monotonicity in time of the lognormal transition kernel.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "stickybs/csv.hpp"
#include "stickybs/model.hpp"
#include "stickybs/path.hpp"
#include "stickybs/pde.hpp"
#include "stickybs/rng.hpp"
#include "stickybs/sim.hpp"
#include "stickybs/stats.hpp"

namespace stickybs {

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Driftless (r = 0) Black-Scholes call.
inline double bs_call_price(double s0, double strike, double T, double sigma) {
    if (!(s0 > 0.0)) throw std::invalid_argument("bs_call_price: s0 must be positive");
    if (!(strike > 0.0)) throw std::invalid_argument("bs_call_price: strike must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("bs_call_price: maturity must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("bs_call_price: sigma must be positive");
    const double sq = sigma * std::sqrt(T);
    const double d1 = std::log(s0 / strike) / sq + 0.5 * sq;
    return s0 * norm_cdf(d1) - strike * norm_cdf(d1 - sq);
}

inline double bs_call_delta(double s0, double strike, double T, double sigma) {
    if (!(s0 > 0.0)) throw std::invalid_argument("bs_call_delta: s0 must be positive");
    if (!(strike > 0.0)) throw std::invalid_argument("bs_call_delta: strike must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("bs_call_delta: maturity must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("bs_call_delta: sigma must be positive");
    const double sq = sigma * std::sqrt(T);
    return norm_cdf(std::log(s0 / strike) / sq + 0.5 * sq);
}

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::time_change;
};

namespace detail {

inline double terminal_value(const ModelParams& q, double s0, double T, Scheme scheme,
                             const ChainSpec* chain, std::uint64_t path_seed_value) {
    switch (scheme) {
        case Scheme::time_change:
            return time_change_terminal(q, s0, T, defaults::n_base_pricing, path_seed_value).value;
        case Scheme::stmca:
            return stmca_terminal(*chain, s0, T, path_seed_value).value;
        case Scheme::gbm_exact:
            return simulate_gbm_exact(q, s0, {0.0, T}, path_seed_value).values.back();
    }
    throw std::logic_error("price_mc: unknown scheme");
}

}  // namespace detail

// Monte Carlo price of h(S_T) under the pricing measure (drift dropped, r = 0
// required). Deterministic given (seed, scheme).
inline McEstimate price_mc(const ModelParams& params, const Payoff& payoff, double s0, double T,
                           long n_paths, std::uint64_t seed, Scheme scheme = Scheme::time_change) {
    if (n_paths < 1) throw std::invalid_argument("price_mc: n_paths must be >= 1");
    if (!(s0 > 0.0)) throw std::invalid_argument("price_mc: s0 must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("price_mc: maturity must be positive");
    const ModelParams q = to_risk_neutral(params);
    ChainSpec chain;
    if (scheme == Scheme::stmca) chain = build_chain(q);

    std::vector<double> pay;
    pay.reserve(static_cast<std::size_t>(n_paths));
    for (long k = 0; k < n_paths; ++k) {
        const double sT = detail::terminal_value(q, s0, T, scheme, &chain,
                                                 path_seed(seed, static_cast<std::uint64_t>(k)));
        pay.push_back(eval_payoff(payoff, sT));
    }
    McEstimate est;
    est.mean = mean(pay);
    est.std_error = std_error(pay);
    est.n_paths = n_paths;
    est.seed = seed;
    est.scheme = scheme;
    return est;
}

// E^Q[S_T] - s0; zero for a martingale. Uses the exact lognormal sampler when
// the model has no sticky point, the time-change scheme otherwise.
inline McEstimate martingale_check(const ModelParams& params, double s0, double T, long n_paths,
                                   std::uint64_t seed) {
    const Scheme scheme = params.rho == 0.0 ? Scheme::gbm_exact : Scheme::time_change;
    McEstimate est = price_mc(params, Payoff::identity(), s0, T, n_paths, seed, scheme);
    est.mean -= s0;
    return est;
}

// One named check: `value` must not exceed `tolerance` for `pass`.
struct CheckResult {
    std::string parameter_point;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct MonotonicityReport {
    std::vector<double> rho_list;
    std::vector<double> t_list;
    std::vector<std::vector<double>> prices;  // prices[rho_index][t_index]
    std::vector<CheckResult> checks;
    bool all_pass = true;
};

// PDE price matrix over rho_list x T_list for a convex payoff, with checks
// that the price is nonincreasing in rho and nondecreasing in T.  Violations
// below 0.1% relative count as numerical noise, not failures.
inline MonotonicityReport monotonicity_suite(const ModelParams& params_base, const Payoff& payoff,
                                             double s0, std::vector<double> t_list,
                                             std::vector<double> rho_list) {
    if (!is_convex(payoff))
        throw std::invalid_argument("monotonicity_suite: payoff must be convex");
    if (t_list.empty() || rho_list.empty())
        throw std::invalid_argument("monotonicity_suite: empty parameter list");
    for (double t : t_list)
        if (t < 0.0) throw std::invalid_argument("monotonicity_suite: negative maturity");

    MonotonicityReport rep;
    rep.rho_list = std::move(rho_list);
    rep.t_list = std::move(t_list);
    rep.prices.assign(rep.rho_list.size(), std::vector<double>(rep.t_list.size(), 0.0));
    for (std::size_t i = 0; i < rep.rho_list.size(); ++i) {
        ModelParams p = params_base;
        p.rho = rep.rho_list[i];
        for (std::size_t j = 0; j < rep.t_list.size(); ++j) {
            const double T = rep.t_list[j];
            rep.prices[i][j] = T == 0.0
                                   ? eval_payoff(payoff, s0)
                                   : solve_pricing(p, payoff, default_pricing_grid(p), T).value(0.0, s0);
        }
    }

    const double kNoiseFloor = 1e-3;  // relative
    auto add_check = [&rep, kNoiseFloor](std::string point, double violation, double scale) {
        CheckResult c;
        c.parameter_point = std::move(point);
        c.value = violation;
        c.tolerance = kNoiseFloor * std::max(scale, 1e-12);
        c.pass = c.value <= c.tolerance;
        rep.all_pass = rep.all_pass && c.pass;
        rep.checks.push_back(std::move(c));
    };
    for (std::size_t j = 0; j < rep.t_list.size(); ++j)
        for (std::size_t i = 0; i + 1 < rep.rho_list.size(); ++i) {
            const double lo = rep.prices[i][j], hi = rep.prices[i + 1][j];
            add_check("T=" + fmt_num(rep.t_list[j]) + ",rho=" + fmt_num(rep.rho_list[i]) + "->" +
                          fmt_num(rep.rho_list[i + 1]),
                      hi - lo, std::max(std::abs(lo), std::abs(hi)));
        }
    for (std::size_t i = 0; i < rep.rho_list.size(); ++i)
        for (std::size_t j = 0; j + 1 < rep.t_list.size(); ++j) {
            const double lo = rep.prices[i][j], hi = rep.prices[i][j + 1];
            add_check("rho=" + fmt_num(rep.rho_list[i]) + ",T=" + fmt_num(rep.t_list[j]) + "->" +
                          fmt_num(rep.t_list[j + 1]),
                      lo - hi, std::max(std::abs(lo), std::abs(hi)));
        }
    return rep;
}

struct KernelPoint {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double value = 0.0;      // lognormal transition density p(t, x, y) in y
    double dvalue_dt = 0.0;  // its time derivative
};

// Transition density of the drifted geometric Brownian motion and its exact
// time derivative:  with z = ln(y/x) - (mu - sigma^2/2) t,
//   p = exp(-z^2 / (2 sigma^2 t)) / (y sigma sqrt(2 pi t)),
//   dp/dt = p * [ z^2/(2 sigma^2 t^2) + z (mu - sigma^2/2)/(sigma^2 t) - 1/(2t) ].
inline KernelPoint kernel_time_derivative(double t, double x, double y, double mu, double sigma) {
    if (!(t > 0.0)) throw std::invalid_argument("kernel_time_derivative: t must be positive");
    if (!(x > 0.0)) throw std::invalid_argument("kernel_time_derivative: x must be positive");
    if (!(y > 0.0)) throw std::invalid_argument("kernel_time_derivative: y must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("kernel_time_derivative: sigma must be positive");
    const double b = mu - 0.5 * sigma * sigma;
    const double z = std::log(y / x) - b * t;
    const double s2t = sigma * sigma * t;
    const double p = std::exp(-0.5 * z * z / s2t) / (y * sigma * std::sqrt(2.0 * M_PI * t));
    KernelPoint kp;
    kp.t = t;
    kp.x = x;
    kp.y = y;
    kp.value = p;
    kp.dvalue_dt = p * (0.5 * z * z / (s2t * t) + z * b / s2t - 0.5 / t);
    return kp;
}

struct TailBounds {
    double y_lo = 0.0;
    double y_hi = 0.0;
};

namespace detail {

// Sign of dp/dt with the (positive, underflow-prone) density factor stripped:
// sign(dp/dt) = sign(z^2 + 2 z b t - sigma^2 t), z = ln(y/x) - b t.
inline double kernel_dt_sign_expr(double t, double x, double y, double mu, double sigma) {
    const double b = mu - 0.5 * sigma * sigma;
    const double z = std::log(y / x) - b * t;
    return z * z + 2.0 * z * b * t - sigma * sigma * t;
}

}  // namespace detail

// Outside [y_lo, y_hi] the kernel is increasing in t on all of (0, T]: the
// sign of dp/dt is the sign of w^2 - (b^2 t^2 + sigma^2 t) with w = ln(y/x),
// and the right-hand side peaks at t = T.  The closed-form bounds are checked
// by a sign sweep before being returned.
inline TailBounds find_monotone_tail(double x, double T, double mu, double sigma) {
    if (!(x > 0.0)) throw std::invalid_argument("find_monotone_tail: x must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("find_monotone_tail: T must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("find_monotone_tail: sigma must be positive");
    const double b = mu - 0.5 * sigma * sigma;
    const double w = std::sqrt(b * b * T * T + sigma * sigma * T);
    TailBounds out{x * std::exp(-w), x * std::exp(w)};

    for (int i = 1; i <= 40; ++i) {
        const double t = T * (0.01 + 0.99 * (i - 1) / 39.0);
        for (double mult : {1.0 + 1e-6, 1.5, 4.0}) {
            if (detail::kernel_dt_sign_expr(t, x, out.y_hi * mult, mu, sigma) <= 0.0 ||
                detail::kernel_dt_sign_expr(t, x, out.y_lo / mult, mu, sigma) <= 0.0)
                throw std::runtime_error("find_monotone_tail: sign sweep failed at t = " +
                                         fmt_num(t));
        }
    }
    return out;
}

}  // namespace stickybs
