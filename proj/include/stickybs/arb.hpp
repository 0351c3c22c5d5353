#pragma once
// With a nonzero interest rate the sticky model admits arbitrage, and the
// strategy is explicit: hold sgn(-r) e^{rt} units of the asset exactly while
// the price sits at the sticky level. Pinned, the undiscounted price is frozen
// at zeta while the bond keeps compounding, so the discounted price drifts
// deterministically at rate -r zeta; the position harvests |r| zeta per unit
// of pinned time with no exposure the rest of the time. In local-time units
// the running gain is |r| rho zeta L_t, which this module computes alongside
// the discrete gain integral so the two can be compared on simulated paths.

#include <cmath>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "csv.hpp"
#include "model.hpp"
#include "path.hpp"

namespace stickybs {

// Discount a simulated path: values become e^{-rt} S_t pointwise. The local
// time and occupation series are carried over unchanged -- they measure time
// spent at the undiscounted level zeta, which discounting does not move.
inline PathSample discounted_path(PathSample path, double r) {
    if (path.values.size() != path.times.size())
        throw std::invalid_argument("discounted_path: malformed path");
    for (std::size_t i = 0; i < path.values.size(); ++i)
        path.values[i] *= std::exp(-r * path.times[i]);
    return path;
}

// One path's worth of the arbitrage demonstration.
struct ArbRun {
    PathSample path;                         // P-dynamics path, undiscounted
    std::vector<double> strategy_values;     // H_t = sgn(-r) e^{rt} 1{S_t = zeta}
    std::vector<double> payoff_curve;        // running gain: integral of H against e^{-rt} S_t
    std::vector<double> theoretical_curve;   // |r| rho zeta L_t
    double r = 0.0;
};

// Evaluate the strategy on a simulated path. The gain integral uses
// left-endpoint (predictable) evaluation H_{t_i} (S~_{t_i+1} - S~_{t_i});
// "at zeta" means |S - zeta| <= at_tol, with the default 0 because both
// samplers emit pinned values exactly equal to zeta.
inline ArbRun arbitrage_gains(PathSample path, const ModelParams& params, double at_tol = 0.0) {
    if (params.r == 0.0)
        throw std::invalid_argument("strategy degenerates; no arbitrage exists");
    if (path.times.empty() || path.values.size() != path.times.size())
        throw std::invalid_argument("arbitrage_gains: malformed path");
    if (path.local_time_zeta.size() != path.times.size())
        throw std::invalid_argument("arbitrage_gains: path lacks a local-time series");
    if (at_tol < 0.0) throw std::invalid_argument("arbitrage_gains: negative tolerance");

    const double r = params.r;
    const double sign = r < 0.0 ? 1.0 : -1.0;  // sgn(-r)
    const std::size_t n = path.times.size();

    ArbRun run;
    run.r = r;
    run.strategy_values.resize(n);
    run.payoff_curve.resize(n);
    run.theoretical_curve.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const bool at_zeta = std::fabs(path.values[i] - params.zeta) <= at_tol;
        run.strategy_values[i] = at_zeta ? sign * std::exp(r * path.times[i]) : 0.0;
        run.theoretical_curve[i] = std::fabs(r) * params.rho * params.zeta * path.local_time_zeta[i];
    }

    run.payoff_curve[0] = 0.0;
    double discounted_prev = path.values[0];  // e^{-r*0} = 1
    for (std::size_t i = 1; i < n; ++i) {
        const double discounted = std::exp(-r * path.times[i]) * path.values[i];
        run.payoff_curve[i] =
            run.payoff_curve[i - 1] + run.strategy_values[i - 1] * (discounted - discounted_prev);
        discounted_prev = discounted;
    }

    run.path = std::move(path);
    return run;
}

inline void write_arb_csv(const ArbRun& run, std::ostream& os) {
    os << "t,H,gain,theoretical\n";
    for (std::size_t i = 0; i < run.path.times.size(); ++i)
        os << fmt_num(run.path.times[i]) << ',' << fmt_num(run.strategy_values[i]) << ','
           << fmt_num(run.payoff_curve[i]) << ',' << fmt_num(run.theoretical_curve[i]) << '\n';
}

}  // namespace stickybs
