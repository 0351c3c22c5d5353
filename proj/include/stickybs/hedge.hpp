#pragma once
// Discrete delta hedging against simulated sticky paths.
//
// The object under study is model mismatch: the agent prices and hedges with
// one model (a Black-Scholes formula, the sticky pricer itself, or a smoothed
// stand-in) while the market follows the true sticky dynamics. The hedge is
// self-financing at rate r = 0, so the terminal tracking error decomposes into
// a systematic part (the mispricing MP = premium - true price) plus a noise
// part that shrinks as the rebalance grid refines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "csv.hpp"
#include "model.hpp"
#include "pde.hpp"
#include "pricing.hpp"
#include "rng.hpp"
#include "sim.hpp"
#include "stats.hpp"

namespace stickybs {

// Annualized realized volatility over a pre-maturity window of length t_prime,
// sampled n_per_time times per unit of time. With m = floor(n_per_time *
// t_prime) increments,
//   vol = sqrt( sum_{i=1..m} (log S_i - log S_{i-1})^2 / t_prime ),
// taken over the most recent m+1 entries of `log_prices` (older samples are
// ignored; the window is the stretch just before the hedge starts).
inline double realized_vol(const std::vector<double>& log_prices, double n_per_time,
                           double t_prime) {
    if (!(t_prime > 0.0))
        throw std::invalid_argument("realized_vol: window length must be positive");
    if (!(n_per_time > 0.0))
        throw std::invalid_argument("realized_vol: sampling rate must be positive");
    const auto m = static_cast<std::size_t>(std::floor(n_per_time * t_prime + 1e-9));
    if (m < 1)
        throw std::invalid_argument("realized_vol: window shorter than one sampling interval");
    if (log_prices.size() < m + 1)
        throw std::invalid_argument("realized_vol: insufficient history (need " +
                                    std::to_string(m + 1) + " samples, got " +
                                    std::to_string(log_prices.size()) + ")");
    double sum = 0.0;
    const std::size_t last = log_prices.size() - 1;
    for (std::size_t i = last - m + 1; i <= last; ++i) {
        const double d = log_prices[i] - log_prices[i - 1];
        sum += d * d;
    }
    return std::sqrt(sum / t_prime);
}

// A hedging model: the price/delta rule the agent applies at rebalance dates.
// The kind picks the rule; `bind_hedge_model` attaches the concrete functions
// for a given payoff and maturity. bs_realized_sigma estimates its volatility
// from each path's own pre-maturity history, so it is bound per path (see
// bind_realized_sigma and run_experiment).
struct HedgeModel {
    enum class Kind { bs_true_sigma, bs_realized_sigma, sticky, smooth_mollified };

    Kind kind = Kind::bs_true_sigma;
    int mollify_n = 16;         // smoothing index for smooth_mollified
    double t_prime = 0.0;       // realized-vol window; <= 0 means the full horizon T
    double n_per_time = 200.0;  // realized-vol sampling rate per unit time

    // Bound rule: price(s, t) and delta(s, t) at calendar time t in [0, T).
    // The pair's components agree except exactly at the sticky level, where
    // they are the two one-sided derivatives; see hedge_backtest for how the
    // hedge resolves the pair to a position.
    std::function<double(double, double)> price;
    std::function<DeltaPair(double, double)> delta;

    bool bound() const { return static_cast<bool>(price) && static_cast<bool>(delta); }

    static HedgeModel bs_true_sigma() { return HedgeModel{}; }
    static HedgeModel bs_realized_sigma(double window = 0.0, double rate = 200.0) {
        HedgeModel m;
        m.kind = Kind::bs_realized_sigma;
        m.t_prime = window;
        m.n_per_time = rate;
        return m;
    }
    static HedgeModel sticky() {
        HedgeModel m;
        m.kind = Kind::sticky;
        return m;
    }
    static HedgeModel smooth_mollified(int n) {
        HedgeModel m;
        m.kind = Kind::smooth_mollified;
        m.mollify_n = n;
        return m;
    }
};

inline const char* hedge_model_name(HedgeModel::Kind k) {
    switch (k) {
        case HedgeModel::Kind::bs_true_sigma: return "bs-true-sigma";
        case HedgeModel::Kind::bs_realized_sigma: return "bs-realized-sigma";
        case HedgeModel::Kind::sticky: return "sticky";
        case HedgeModel::Kind::smooth_mollified: return "smooth";
    }
    return "unknown";
}

namespace detail {

inline void bind_closed_form(HedgeModel& m, double sigma, const Payoff& payoff, double T) {
    if (payoff.kind == Payoff::Kind::identity) {
        // Replicating the stock itself: price s, delta one, for any dynamics.
        m.price = [](double s, double) { return s; };
        m.delta = [](double, double) { return DeltaPair{1.0, 1.0}; };
        return;
    }
    if (payoff.kind != Payoff::Kind::call)
        throw std::invalid_argument(
            "closed-form hedge models support call or identity payoffs only");
    const double strike = payoff.strike;
    m.price = [strike, sigma, T](double s, double t) {
        return bs_call_price(s, strike, T - t, sigma);
    };
    m.delta = [strike, sigma, T](double s, double t) {
        const double d = bs_call_delta(s, strike, T - t, sigma);
        return DeltaPair{d, d};
    };
}

inline void bind_surface(HedgeModel& m, std::shared_ptr<const PriceSurface> surf) {
    m.price = [surf](double s, double t) { return surf->value(t, s); };
    m.delta = [surf](double s, double t) { return surf->delta_at(t, s); };
}

}  // namespace detail

// Attach price/delta sources for hedging `payoff` to maturity T when the true
// dynamics are `params_true`. An already-solved sticky surface can be passed
// in to avoid a duplicate PDE solve (it must price the same payoff/maturity).
inline HedgeModel bind_hedge_model(HedgeModel m, const ModelParams& params_true,
                                   const Payoff& payoff, double T,
                                   std::shared_ptr<const PriceSurface> sticky_surface = nullptr) {
    if (!(T > 0.0)) throw std::invalid_argument("bind_hedge_model: maturity must be positive");
    const ModelParams q = to_risk_neutral(params_true);
    switch (m.kind) {
        case HedgeModel::Kind::bs_true_sigma:
            detail::bind_closed_form(m, q.sigma, payoff, T);
            break;
        case HedgeModel::Kind::bs_realized_sigma:
            throw std::invalid_argument(
                "bind_hedge_model: realized-sigma model takes its volatility from each "
                "path's history; use bind_realized_sigma or run_experiment");
        case HedgeModel::Kind::sticky: {
            auto surf = sticky_surface
                            ? std::move(sticky_surface)
                            : std::make_shared<const PriceSurface>(
                                  solve_pricing(q, payoff, default_pricing_grid(q), T));
            detail::bind_surface(m, std::move(surf));
            break;
        }
        case HedgeModel::Kind::smooth_mollified: {
            const MollifiedModel mm = mollify(q, m.mollify_n);
            const GridSpec grid = resolve_window(default_pricing_grid(q), mm);
            auto surf = std::make_shared<const PriceSurface>(solve_smooth(mm, payoff, grid, T));
            detail::bind_surface(m, std::move(surf));
            break;
        }
    }
    return m;
}

// Bind a realized-sigma model with an explicit volatility estimate.
inline HedgeModel bind_realized_sigma(HedgeModel m, double sigma_hat, const Payoff& payoff,
                                      double T) {
    if (m.kind != HedgeModel::Kind::bs_realized_sigma)
        throw std::invalid_argument("bind_realized_sigma: model kind is not bs_realized_sigma");
    if (!(sigma_hat > 0.0))
        throw std::invalid_argument("bind_realized_sigma: volatility estimate must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("bind_realized_sigma: maturity must be positive");
    detail::bind_closed_form(m, sigma_hat, payoff, T);
    return m;
}

// One delta-hedged path. At t_0 = 0 the agent sells the claim at the model
// price, buys delta_0 shares and parks the rest in cash (r = 0). At each
// t_i = i T / N, i = 1..N-1, the position is rebalanced self-financingly:
//   cash -= (delta_i - delta_{i-1}) * S_{t_i}.
// At maturity the claim settles at its realized payoff and
//   tracking_error = cash + delta_{N-1} * S_T - h(S_T).
// portfolio_values[i] records cash + delta_i * S_{t_i} - model price at t_i
// (zero at i = 0 by construction); the final entry is the tracking error.
//
// The position taken is the midpoint of the delta pair. Away from the sticky
// level the two components agree, so this only matters when a rebalance date
// finds the path exactly at the level, where the optimal strategy is not
// unique: any value between the one-sided derivatives replicates in the
// continuous limit. At discrete rebalance dates the pinned state has positive
// probability and the two sides err in opposite directions depending on which
// way the path leaves, so the midpoint is the variance-minimizing
// representative (either one-sided choice roughly doubles the variance of the
// pinned intervals' hedge error).
struct BacktestRecord {
    std::vector<double> deltas;            // held on [t_i, t_{i+1}), i = 0..N-1
    std::vector<double> portfolio_values;  // N+1 entries; last equals tracking_error
    double tracking_error = 0.0;
    double premium = 0.0;                  // model price charged at t = 0
};

inline BacktestRecord hedge_backtest(const PathSample& path, const HedgeModel& model,
                                     const Payoff& payoff, double T, int N) {
    if (!model.bound())
        throw std::invalid_argument(
            "hedge_backtest: model has no bound price/delta rule (bind it first)");
    if (!(T > 0.0)) throw std::invalid_argument("hedge_backtest: maturity must be positive");
    if (N < 1) throw std::invalid_argument("hedge_backtest: need at least one rebalance");
    if (path.times.empty() || path.values.size() != path.times.size())
        throw std::invalid_argument("hedge_backtest: malformed path");
    if (path.times.back() < T * (1.0 - 1e-12))
        throw std::invalid_argument("hedge_backtest: path too short for the requested maturity");

    // Last sample at or before t (sample-and-hold; the nudge absorbs grid
    // round-off without ever reaching the next sample).
    auto value_at = [&](double t) {
        auto it = std::upper_bound(path.times.begin(), path.times.end(), t + 1e-12 * T);
        const std::size_t j =
            (it == path.times.begin()) ? 0 : static_cast<std::size_t>(it - path.times.begin()) - 1;
        return path.values[j];
    };

    BacktestRecord rec;
    rec.deltas.reserve(static_cast<std::size_t>(N));
    rec.portfolio_values.reserve(static_cast<std::size_t>(N) + 1);

    auto take = [](DeltaPair d) { return 0.5 * (d.left + d.right); };

    double s = value_at(0.0);
    rec.premium = model.price(s, 0.0);
    double delta = take(model.delta(s, 0.0));
    double cash = rec.premium - delta * s;
    rec.deltas.push_back(delta);
    rec.portfolio_values.push_back(cash + delta * s - rec.premium);

    for (int i = 1; i < N; ++i) {
        const double t = T * (static_cast<double>(i) / static_cast<double>(N));
        s = value_at(t);
        const double next = take(model.delta(s, t));
        cash -= (next - delta) * s;
        delta = next;
        rec.deltas.push_back(delta);
        rec.portfolio_values.push_back(cash + delta * s - model.price(s, t));
    }

    s = value_at(T);
    rec.tracking_error = cash + delta * s - eval_payoff(payoff, s);
    rec.portfolio_values.push_back(rec.tracking_error);
    return rec;
}

// Aggregate of a hedging experiment: n_paths backtests of one model against
// the true dynamics. premium_used is the ensemble mean of the per-path
// premiums (they differ across paths only for bs_realized_sigma), app_price
// the PDE price of the claim under the true dynamics, and
//   mp        = premium_used - app_price,
//   mu_hat    = mean tracking error,
//   sigma_hat = sample standard deviation of the tracking errors,
//   rms       = sqrt(mean squared tracking error),
// so rms^2 = mu_hat^2 + sigma_hat^2 (n-1)/n up to round-off.
struct HedgeReport {
    std::string model;
    double rho = 0.0;
    std::vector<BacktestRecord> paths;
    std::vector<double> tracking_errors;
    std::vector<double> premiums;
    std::vector<double> sigma_estimates;  // per-path realized vol (bs_realized_sigma only)
    double premium_used = 0.0;
    double app_price = 0.0;
    double mp = 0.0;
    double mu_hat = 0.0;
    double sigma_hat = 0.0;
    double rms = 0.0;
    long n_paths = 0;
    int n_rebalances = 0;
    std::uint64_t seed = 0;
};

// Run the mismatch experiment: simulate n_paths of the true sticky dynamics
// under its martingale measure, hedge each with `model` rebalancing N times,
// and aggregate. The simulation grid refines the rebalance grid (at least
// defaults::n_out samples), so every rebalance date is an emitted sample.
// A finite premium_override replaces the model premium at t = 0 (the hedge
// ratios are unchanged; tracking errors shift by the premium difference).
//
// Paths come from the Markov chain by default (rho = 0 always uses exact GBM):
// chain paths are piecewise constant, so their values at the rebalance dates
// are exactly the process and every adapted hedge has zero-mean profit. The
// time-change sampler stays available for comparison, but its held samples
// near the sticky level are slightly informed by the step in progress, and a
// delta that is discontinuous there turns that into a visible bias as N grows.
inline HedgeReport run_experiment(const ModelParams& params_true, HedgeModel model,
                                  const Payoff& payoff, double s0, double T, int N, long n_paths,
                                  std::uint64_t seed,
                                  double premium_override = std::numeric_limits<double>::quiet_NaN(),
                                  Scheme scheme = Scheme::stmca) {
    const ModelParams q = to_risk_neutral(params_true);
    if (!(s0 > 0.0)) throw std::invalid_argument("run_experiment: s0 must be positive");
    if (!(T > 0.0)) throw std::invalid_argument("run_experiment: maturity must be positive");
    if (N < 1) throw std::invalid_argument("run_experiment: need at least one rebalance");
    if (n_paths < 1) throw std::invalid_argument("run_experiment: need at least one path");
    if (q.rho > 0.0 && scheme == Scheme::gbm_exact)
        throw std::invalid_argument("run_experiment: gbm_exact requires rho = 0");

    // True price of the claim; doubles as the sticky model's pricing surface.
    auto app_surface = std::make_shared<const PriceSurface>(
        solve_pricing(q, payoff, default_pricing_grid(q), T));
    const double app = app_surface->value(0.0, s0);

    const bool realized = model.kind == HedgeModel::Kind::bs_realized_sigma;
    if (!realized && !model.bound()) model = bind_hedge_model(model, q, payoff, T, app_surface);

    // Default history window: one full horizon of pre-maturity data. Sticky
    // paths spend an O(1) fraction of calendar time pinned, so a window that is
    // short relative to T samples the pinned/free mix too noisily and biases
    // the volatility estimate the agent trades on.
    const double window = model.t_prime > 0.0 ? model.t_prime : T;
    const int hist_samples =
        realized ? static_cast<int>(std::floor(model.n_per_time * window + 1e-9)) : 0;
    if (realized && hist_samples < 1)
        throw std::invalid_argument(
            "run_experiment: realized-vol window shorter than one sampling interval");
    const std::uint64_t history_master = splitmix64(seed) + 1;  // stream separate from the paths

    const int per = N >= defaults::n_out ? 1 : (defaults::n_out + N - 1) / N;
    const int n_out = N * per;

    HedgeReport rep;
    rep.model = hedge_model_name(model.kind);
    rep.rho = q.rho;
    rep.n_paths = n_paths;
    rep.n_rebalances = N;
    rep.seed = seed;
    rep.paths.reserve(static_cast<std::size_t>(n_paths));
    rep.tracking_errors.reserve(static_cast<std::size_t>(n_paths));
    rep.premiums.reserve(static_cast<std::size_t>(n_paths));

    auto uniform_times = [](double horizon, int steps) {
        std::vector<double> ts(static_cast<std::size_t>(steps) + 1);
        for (int j = 0; j <= steps; ++j)
            ts[static_cast<std::size_t>(j)] =
                horizon * (static_cast<double>(j) / static_cast<double>(steps));
        return ts;
    };

    ChainSpec chain;
    const bool use_chain = q.rho > 0.0 && scheme == Scheme::stmca;
    if (use_chain) chain = build_chain(q);
    auto draw_path = [&](double horizon, int samples, std::uint64_t path_key) {
        if (q.rho == 0.0) return simulate_gbm_exact(q, s0, uniform_times(horizon, samples), path_key);
        if (use_chain) return simulate_stmca(chain, s0, horizon, path_key, samples);
        return time_change_sticky(q, s0, horizon, defaults::n_base_steps, path_key, samples);
    };

    for (long k = 0; k < n_paths; ++k) {
        const std::uint64_t sk = path_seed(seed, static_cast<std::uint64_t>(k));
        PathSample path = draw_path(T, n_out, sk);

        const HedgeModel* use = &model;
        HedgeModel bound_k;
        if (realized) {
            const std::uint64_t hk = path_seed(history_master, static_cast<std::uint64_t>(k));
            PathSample hist = draw_path(window, hist_samples, hk);
            std::vector<double> lp(hist.values.size());
            std::transform(hist.values.begin(), hist.values.end(), lp.begin(),
                           [](double v) { return std::log(v); });
            const double sig = realized_vol(lp, model.n_per_time, window);
            rep.sigma_estimates.push_back(sig);
            bound_k = bind_realized_sigma(model, sig, payoff, T);
            use = &bound_k;
        }

        BacktestRecord rec = hedge_backtest(path, *use, payoff, T, N);
        if (!std::isnan(premium_override)) {
            const double shift = premium_override - rec.premium;
            rec.premium = premium_override;
            for (double& pv : rec.portfolio_values) pv += shift;
            rec.tracking_error += shift;
        }
        rep.premiums.push_back(rec.premium);
        rep.tracking_errors.push_back(rec.tracking_error);
        rep.paths.push_back(std::move(rec));
    }

    rep.premium_used = mean(rep.premiums);
    rep.app_price = app;
    rep.mp = rep.premium_used - app;
    rep.mu_hat = mean(rep.tracking_errors);
    rep.sigma_hat = rep.tracking_errors.size() > 1 ? sample_std(rep.tracking_errors) : 0.0;
    double sq = 0.0;
    for (double e : rep.tracking_errors) sq += e * e;
    rep.rms = std::sqrt(sq / static_cast<double>(rep.tracking_errors.size()));
    return rep;
}

// Rebalance-granularity sweep: one experiment per N in n_list, all from the
// same master seed so path draws are paired across N. slope is the fitted
// log-log slope of sigma_hat against N (about -1/2 when the model prices the
// dynamics correctly; near 0 when a bias floor dominates).
struct GranularitySweep {
    std::vector<int> n_list;
    std::vector<HedgeReport> reports;
    double slope = 0.0;
};

inline GranularitySweep granularity_sweep(const ModelParams& params_true, const HedgeModel& model,
                                          const Payoff& payoff, double s0, double T,
                                          const std::vector<int>& n_list, long n_paths,
                                          std::uint64_t seed,
                                          double premium_override =
                                              std::numeric_limits<double>::quiet_NaN(),
                                          Scheme scheme = Scheme::stmca) {
    if (n_list.empty()) throw std::invalid_argument("granularity_sweep: empty rebalance list");
    for (int n : n_list)
        if (n < 1) throw std::invalid_argument("granularity_sweep: rebalance counts must be >= 1");

    // Bind once so surface-backed models solve a single PDE for the whole sweep.
    HedgeModel bound = model;
    if (model.kind != HedgeModel::Kind::bs_realized_sigma && !bound.bound())
        bound = bind_hedge_model(bound, params_true, payoff, T);

    GranularitySweep sweep;
    sweep.n_list = n_list;
    sweep.reports.reserve(n_list.size());
    std::vector<double> log_n, log_sig;
    for (int n : n_list) {
        sweep.reports.push_back(run_experiment(params_true, bound, payoff, s0, T, n, n_paths, seed,
                                               premium_override, scheme));
        const double sig = sweep.reports.back().sigma_hat;
        if (sig > 0.0) {
            log_n.push_back(std::log(static_cast<double>(n)));
            log_sig.push_back(std::log(sig));
        }
    }
    sweep.slope = log_n.size() >= 2 ? regression_slope(log_n, log_sig) : 0.0;
    return sweep;
}

// CSV rows for the two report tables.
struct GranularityRow {
    double rho = 0.0;
    int n_rebalances = 0;
    double premium = 0.0;
    double mu_hat = 0.0;
    double sigma_hat = 0.0;
};

inline GranularityRow granularity_row(const HedgeReport& r) {
    return GranularityRow{r.rho, r.n_rebalances, r.premium_used, r.mu_hat, r.sigma_hat};
}

inline void write_granularity_csv(const std::vector<GranularityRow>& rows, std::ostream& os) {
    os << "rho,N,premium,mu_hat,sigma_hat\n";
    for (const auto& r : rows)
        os << fmt_num(r.rho) << ',' << r.n_rebalances << ',' << fmt_num(r.premium) << ','
           << fmt_num(r.mu_hat) << ',' << fmt_num(r.sigma_hat) << '\n';
}

struct MismatchRow {
    std::string model;  // table label, e.g. "1", "2", "3"
    double rho = 0.0;
    double premium = 0.0;
    double app = 0.0;
    double mp = 0.0;
    double mu_hat = 0.0;
    double sigma_hat = 0.0;
};

inline MismatchRow mismatch_row(const HedgeReport& r, std::string label = {}) {
    return MismatchRow{label.empty() ? r.model : std::move(label),
                       r.rho,
                       r.premium_used,
                       r.app_price,
                       r.mp,
                       r.mu_hat,
                       r.sigma_hat};
}

inline void write_mismatch_csv(const std::vector<MismatchRow>& rows, std::ostream& os) {
    os << "model,rho,premium,app,mp,mu_hat,sigma_hat\n";
    for (const auto& r : rows)
        os << r.model << ',' << fmt_num(r.rho) << ',' << fmt_num(r.premium) << ','
           << fmt_num(r.app) << ',' << fmt_num(r.mp) << ',' << fmt_num(r.mu_hat) << ','
           << fmt_num(r.sigma_hat) << '\n';
}

}  // namespace stickybs
