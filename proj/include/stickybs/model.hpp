#pragma once
// Market model: sticky geometric Brownian motion,
//   dS_t = 1{S_t != zeta} S_t (mu dt + sigma dB_t),  1{S_t = zeta} dt = rho dL_t^zeta(S),
// plus a riskless account growing at rate r. rho = 0 is plain Black-Scholes.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace stickybs {

struct ModelParams {
    double mu = 0.0;     // drift (1/time)
    double sigma = 0.25; // volatility away from the sticky level (1/sqrt(time))
    double rho = 1.0;    // stickiness: time spent at zeta per unit of local time
    double zeta = 10.0;  // sticky price level
    double r = 0.0;      // riskless rate
};

inline ModelParams validate(const ModelParams& p) {
    if (!std::isfinite(p.mu)) throw std::invalid_argument("mu must be finite");
    if (!std::isfinite(p.sigma) || !(p.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (!std::isfinite(p.rho) || !(p.rho >= 0.0)) throw std::invalid_argument("rho must be nonnegative");
    if (!std::isfinite(p.zeta) || !(p.zeta > 0.0)) throw std::invalid_argument("zeta must be positive");
    if (!std::isfinite(p.r)) throw std::invalid_argument("r must be finite");
    return p;
}

// Scale density s'(x) = x^(-2 mu / sigma^2), normalized so s(1) = 0, and speed
// data m(dx) = speed_density(x) dx + atom_mass * delta_zeta(dx) with
// speed_density(x) = 1 / (s'(x) sigma^2 x^2) and atom_mass = rho / s'(zeta).
// Note on normalization: the continuous density is kept in half-normalized
// units, the atom at full mass, so the expected exit time from (a,b) is
//   E_x[tau] = 2 * int G_(a,b)(x,y) speed_density(y) dy + atom_mass * G(x,zeta),
// where G is the two-sided exit Green's function on natural scale.  The factor
// 2 on the integral is pinned by the Brownian case E_0[tau_(-h,h)] = h^2; the
// bare atom term is pinned by the model equation occupation = rho * L with L
// the speed-normalized local time (atom m({zeta}) = rho/s'(zeta) exactly, so a
// symmetric cell of scale half-width h picks up the sticky overhang rho*h/2).
struct ScaleSpeed {
    double exponent = 0.0;  // -2 mu / sigma^2
    double sigma = 0.0;
    double rho = 0.0;
    double zeta = 0.0;
    double atom_mass = 0.0; // rho / s'(zeta)

    double scale_density(double x) const { return std::pow(x, exponent); }

    // s(x) = int_1^x u^exponent du
    double scale(double x) const {
        if (exponent == -1.0) return std::log(x);
        return (std::pow(x, exponent + 1.0) - 1.0) / (exponent + 1.0);
    }

    double speed_density(double x) const {
        return 1.0 / (scale_density(x) * sigma * sigma * x * x);
    }
};

inline ScaleSpeed scale_speed(const ModelParams& p) {
    validate(p);
    ScaleSpeed ss;
    ss.exponent = -2.0 * p.mu / (p.sigma * p.sigma);
    ss.sigma = p.sigma;
    ss.rho = p.rho;
    ss.zeta = p.zeta;
    ss.atom_mass = p.rho / std::pow(p.zeta, ss.exponent);
    return ss;
}

// Equivalent local martingale measure: exists only for r = 0, and under it the
// drift vanishes while the stickiness (rho, zeta) persists.
inline ModelParams to_risk_neutral(const ModelParams& p) {
    validate(p);
    if (p.r != 0.0) throw std::invalid_argument("no ELMM exists for r != 0");
    ModelParams q = p;
    q.mu = 0.0;
    return q;
}

struct Payoff {
    enum class Kind { call, put, constant, identity, custom };
    enum class TailGrowth { linear, superlinear };

    Kind kind = Kind::call;
    double strike = 0.0;                   // strike (call/put) or level (constant)
    std::vector<double> xs, ys;            // custom: tabulated nodes, linear interpolation
    TailGrowth tail = TailGrowth::linear;  // declared growth beyond the table

    static Payoff call(double strike) {
        if (!(strike > 0.0)) throw std::invalid_argument("call strike must be positive");
        return Payoff{Kind::call, strike, {}, {}, TailGrowth::linear};
    }
    static Payoff put(double strike) {
        if (!(strike > 0.0)) throw std::invalid_argument("put strike must be positive");
        return Payoff{Kind::put, strike, {}, {}, TailGrowth::linear};
    }
    static Payoff constant(double level) { return Payoff{Kind::constant, level, {}, {}, TailGrowth::linear}; }
    static Payoff identity() { return Payoff{Kind::identity, 0.0, {}, {}, TailGrowth::linear}; }
    static Payoff custom(std::vector<double> xs, std::vector<double> ys,
                         TailGrowth tail = TailGrowth::linear) {
        if (xs.size() != ys.size() || xs.size() < 2)
            throw std::invalid_argument("custom payoff needs >= 2 tabulated points");
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
                throw std::invalid_argument("custom payoff table must be finite");
            if (i > 0 && !(xs[i] > xs[i - 1]))
                throw std::invalid_argument("custom payoff nodes must be increasing");
        }
        if (!(xs.front() > 0.0)) throw std::invalid_argument("custom payoff nodes must be positive");
        return Payoff{Kind::custom, 0.0, std::move(xs), std::move(ys), tail};
    }

    // Inside the locally bounded payoff class with hedging guarantees; custom
    // tables declared superlinear beyond their range are excluded.
    bool replicable() const { return kind != Kind::custom || tail == TailGrowth::linear; }
};

inline double eval_payoff(const Payoff& h, double x) {
    if (!(x > 0.0)) throw std::domain_error("payoff evaluated at nonpositive price");
    switch (h.kind) {
        case Payoff::Kind::call: return std::max(x - h.strike, 0.0);
        case Payoff::Kind::put: return std::max(h.strike - x, 0.0);
        case Payoff::Kind::constant: return h.strike;
        case Payoff::Kind::identity: return x;
        case Payoff::Kind::custom: break;
    }
    const auto& xs = h.xs;
    const auto& ys = h.ys;
    const std::size_t n = xs.size();
    if (x <= xs.front()) {  // extrapolate with the edge slope (linear growth)
        double sl = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        return ys[0] + sl * (x - xs[0]);
    }
    if (x >= xs.back()) {
        double sl = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
        return ys[n - 1] + sl * (x - xs[n - 1]);
    }
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] * (1.0 - w) + ys[i + 1] * w;
}

// Convexity check used by the monotonicity suite (call/put/constant/identity
// are convex; custom tables are checked by their discrete slopes).
inline bool is_convex(const Payoff& h) {
    if (h.kind != Payoff::Kind::custom) return true;
    for (std::size_t i = 0; i + 2 < h.xs.size(); ++i) {
        double sl0 = (h.ys[i + 1] - h.ys[i]) / (h.xs[i + 1] - h.xs[i]);
        double sl1 = (h.ys[i + 2] - h.ys[i + 1]) / (h.xs[i + 2] - h.xs[i + 1]);
        double scale = std::max({1.0, std::abs(sl0), std::abs(sl1)});
        if (sl1 < sl0 - 1e-10 * scale) return false;
    }
    return true;
}

}  // namespace stickybs
