#include "catch2/catch_amalgamated.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stickybs/model.hpp"
#include "stickybs/pde.hpp"
#include "stickybs/rng.hpp"
#include "stickybs/sim.hpp"
#include "stickybs/stats.hpp"

using namespace stickybs;

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const ModelParams kBase{0.0, 0.25, 1.0, 10.0, 0.0};  // mu sigma rho zeta r
const double kT = 10.0;

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// At-the-money driftless call, s0 = K: s0 * (Phi(sigma sqrt(T)/2) - Phi(-sigma sqrt(T)/2)).
double bs_atm_call(double s0, double sigma, double T) {
    const double d1 = 0.5 * sigma * std::sqrt(T);
    return s0 * (norm_cdf(d1) - norm_cdf(-d1));
}

// One-sided second derivative at the sticky node: the parabola through the node
// and its two neighbors on the chosen side has a constant second derivative.
double onesided_vxx(const PriceSurface& s, std::size_t k, bool right_side) {
    const auto& x = s.grid.x_nodes;
    const auto& v = s.values[k];
    const std::size_t zi = s.zeta_index;
    const std::size_t b = right_side ? zi + 1 : zi - 1;
    const std::size_t c = right_side ? zi + 2 : zi - 2;
    const double h1 = x[b] - x[zi], h2 = x[c] - x[zi];
    const double q = (v[c] - v[zi] - (v[b] - v[zi]) * h2 / h1) / (h2 * (h2 - h1));
    return 2.0 * q;
}

}  // namespace

TEST_CASE("default_pricing_grid brackets the sticky level and contains it exactly") {
    GridSpec g = default_pricing_grid(kBase);
    REQUIRE(g.x_nodes.size() == 1001);
    CHECK_THAT(g.x_nodes.front(), WithinRel(10.0 / 16.0, 1e-12));
    CHECK_THAT(g.x_nodes.back(), WithinRel(160.0, 1e-12));
    CHECK(std::count(g.x_nodes.begin(), g.x_nodes.end(), 10.0) == 1);
    for (std::size_t i = 1; i < g.x_nodes.size(); ++i) CHECK(g.x_nodes[i] > g.x_nodes[i - 1]);
}

TEST_CASE("solve_pricing: identity payoff is stationary with unit delta") {
    GridSpec g = default_pricing_grid(kBase);
    g.t_steps = 400;
    PriceSurface s = solve_pricing(kBase, Payoff::identity(), g, kT);
    double worst = 0.0;
    for (const auto& row : s.values)
        for (std::size_t j = 0; j < row.size(); ++j)
            worst = std::max(worst, std::abs(row[j] - g.x_nodes[j]));
    CHECK(worst <= 1e-8);
    DeltaPair d = delta(s, 0.0, 10.0);
    CHECK_THAT(d.left, WithinAbs(1.0, 1e-9));
    CHECK_THAT(d.right, WithinAbs(1.0, 1e-9));
    DeltaPair mid = delta(s, 4.3, 7.7);
    CHECK_THAT(mid.left, WithinAbs(1.0, 1e-9));
    CHECK_THAT(mid.right, WithinAbs(1.0, 1e-9));
}

TEST_CASE("solve_pricing: terminal level stores the payoff verbatim") {
    GridSpec g = default_pricing_grid(kBase, 201);
    g.t_steps = 20;
    Payoff call = Payoff::call(10.0);
    PriceSurface s = solve_pricing(kBase, call, g, kT);
    REQUIRE(s.values.size() == 21);
    for (std::size_t j = 0; j < g.x_nodes.size(); ++j)
        CHECK(s.values.back()[j] == eval_payoff(call, g.x_nodes[j]));
}

TEST_CASE("solve_pricing: rho=0 call matches the closed form") {
    ModelParams p = kBase;
    p.rho = 0.0;
    PriceSurface s = solve_pricing(p, Payoff::call(10.0), default_pricing_grid(p), kT);
    const double v = s.value(0.0, 10.0);
    const double bs = bs_atm_call(10.0, 0.25, kT);
    CHECK_THAT(v, WithinRel(bs, 5e-3));  // contract tolerance
    CHECK_THAT(v, WithinAbs(bs, 1e-3));  // regression guard (observed ~3e-5)
}

TEST_CASE("solve_pricing: rho=0 delta matches the closed-form delta") {
    ModelParams p = kBase;
    p.rho = 0.0;
    PriceSurface s = solve_pricing(p, Payoff::call(10.0), default_pricing_grid(p), kT);
    DeltaPair d = delta(s, 0.0, 10.0);
    const double phi_d1 = norm_cdf(0.5 * 0.25 * std::sqrt(kT));
    CHECK(d.left == d.right);
    CHECK_THAT(d.right, WithinRel(phi_d1, 0.01));
}

TEST_CASE("solve_pricing: sticky call prices hit the published values") {
    Payoff call = Payoff::call(10.0);
    ModelParams p = kBase;

    p.rho = 1.0;
    const double v1 = solve_pricing(p, call, default_pricing_grid(p), kT).value(0.0, 10.0);
    CHECK_THAT(v1, WithinAbs(2.436, 0.02));
    CHECK_THAT(v1, WithinAbs(2.4500, 0.01));  // frozen default-grid value

    p.rho = 2.0;
    const double v2 = solve_pricing(p, call, default_pricing_grid(p), kT).value(0.0, 10.0);
    CHECK_THAT(v2, WithinAbs(1.997, 0.02));
    CHECK_THAT(v2, WithinAbs(2.0043, 0.01));  // frozen default-grid value
}

TEST_CASE("solve_pricing: drift is ignored under the pricing measure") {
    GridSpec g = default_pricing_grid(kBase, 201);
    g.t_steps = 50;
    ModelParams drifted = kBase;
    drifted.mu = 0.35;
    PriceSurface a = solve_pricing(kBase, Payoff::call(10.0), g, kT);
    PriceSurface b = solve_pricing(drifted, Payoff::call(10.0), g, kT);
    for (std::size_t j = 0; j < g.x_nodes.size(); ++j) CHECK(a.values[0][j] == b.values[0][j]);
}

TEST_CASE("solve_pricing: put-call parity holds to solver precision") {
    // The scheme reproduces linear functions exactly, so C - P = x - K transfers
    // from the terminal data to every level.
    GridSpec g = default_pricing_grid(kBase);
    g.t_steps = 400;
    PriceSurface c = solve_pricing(kBase, Payoff::call(10.0), g, kT);
    PriceSurface p = solve_pricing(kBase, Payoff::put(10.0), g, kT);
    for (double x : {8.0, 10.0, 13.7}) {
        const double gap = c.value(0.0, x) - p.value(0.0, x);
        CHECK_THAT(gap, WithinAbs(x - 10.0, 1e-8));
    }
}

TEST_CASE("delta: jump at the sticky level matches the interface condition") {
    // v_t(t,zeta) = -(1/rho) (v_x(zeta+) - v_x(zeta-)) and continuity of v_t give
    // jump = (rho sigma^2 zeta^2 / 2) v_xx(zeta+-).
    PriceSurface s = solve_pricing(kBase, Payoff::call(10.0), default_pricing_grid(kBase), kT);
    const double cst = 0.5 * kBase.rho * kBase.sigma * kBase.sigma * kBase.zeta * kBase.zeta;
    for (double t : {0.0, 2.5, 5.0}) {
        const auto k = static_cast<std::size_t>(t / kT * s.grid.t_steps + 0.5);
        const double jump = s.dx_right_at_zeta[k] - s.dx_left_at_zeta[k];
        REQUIRE(jump > 0.0);
        CHECK_THAT(cst * onesided_vxx(s, k, true), WithinRel(jump, 0.03));
        CHECK_THAT(cst * onesided_vxx(s, k, false), WithinRel(jump, 0.03));
    }
}

TEST_CASE("interface consistency residual shrinks under grid refinement") {
    const double cst = 0.5 * kBase.sigma * kBase.sigma * kBase.zeta * kBase.zeta;
    std::vector<double> residual;
    for (int n : {201, 401, 801}) {
        GridSpec g = default_pricing_grid(kBase, n);
        g.t_steps = 2000;
        PriceSurface s = solve_pricing(kBase, Payoff::call(10.0), g, kT);
        const double target = (s.dx_right_at_zeta[0] - s.dx_left_at_zeta[0]) / kBase.rho;
        const double rr = std::abs(cst * onesided_vxx(s, 0, true) - target);
        const double rl = std::abs(cst * onesided_vxx(s, 0, false) - target);
        residual.push_back(std::max(rr, rl));
    }
    CHECK(residual[0] / residual[1] >= 1.5);
    CHECK(residual[1] / residual[2] >= 1.5);
}

TEST_CASE("convex payoff stays convex and the delta jump stays nonnegative") {
    PriceSurface s = solve_pricing(kBase, Payoff::call(10.0), default_pricing_grid(kBase), kT);
    const auto& x = s.grid.x_nodes;
    double min_curv = std::numeric_limits<double>::max();
    double min_gap = std::numeric_limits<double>::max();
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        const auto& v = s.values[k];
        for (std::size_t j = 1; j + 1 < x.size(); ++j) {
            const double sl0 = (v[j] - v[j - 1]) / (x[j] - x[j - 1]);
            const double sl1 = (v[j + 1] - v[j]) / (x[j + 1] - x[j]);
            min_curv = std::min(min_curv, sl1 - sl0);
        }
        min_gap = std::min(min_gap, s.dx_right_at_zeta[k] - s.dx_left_at_zeta[k]);
    }
    CHECK(min_curv >= -1e-9);
    CHECK(min_gap >= 0.0);
}

TEST_CASE("price increases monotonically to the Black-Scholes value as rho drops") {
    Payoff call = Payoff::call(10.0);
    ModelParams p = kBase;
    p.rho = 0.0;
    const double limit = solve_pricing(p, call, default_pricing_grid(p), kT).value(0.0, 10.0);
    double prev = 0.0;
    for (double rho : {1.0, 0.1, 0.01, 0.001}) {
        p.rho = rho;
        const double v = solve_pricing(p, call, default_pricing_grid(p), kT).value(0.0, 10.0);
        CHECK(v > prev);
        CHECK(v < limit);
        prev = v;
    }
    CHECK_THAT(prev, WithinAbs(limit, 1e-3));
}

TEST_CASE("fully implicit stepping agrees with the trapezoidal default") {
    Payoff call = Payoff::call(10.0);
    GridSpec trap = default_pricing_grid(kBase);
    GridSpec impl = default_pricing_grid(kBase);
    impl.theta = 1.0;
    impl.t_steps = 500;
    const double a = solve_pricing(kBase, call, trap, kT).value(0.0, 10.0);
    const double b = solve_pricing(kBase, call, impl, kT).value(0.0, 10.0);
    CHECK_THAT(b, WithinAbs(a, 0.01));
}

TEST_CASE("PDE price agrees with Monte Carlo within three standard errors") {
    Payoff call = Payoff::call(10.0);
    const int n_paths = 10000;
    for (double rho : {1.0, 2.0}) {
        ModelParams p = kBase;
        p.rho = rho;
        const double pde = solve_pricing(p, call, default_pricing_grid(p), kT).value(0.0, 10.0);
        std::vector<double> pay;
        pay.reserve(n_paths);
        const ModelParams q = to_risk_neutral(p);
        for (int k = 0; k < n_paths; ++k) {
            TerminalSample ts = time_change_terminal(q, 10.0, kT, defaults::n_base_pricing,
                                                     path_seed(811u, static_cast<std::uint64_t>(k)));
            pay.push_back(eval_payoff(call, ts.value));
        }
        const double gap = std::abs(mean(pay) - pde);
        CHECK(gap <= 3.0 * std_error(pay));
    }
}

TEST_CASE("solve_pricing rejects bad inputs naming the problem") {
    Payoff call = Payoff::call(10.0);
    GridSpec g = default_pricing_grid(kBase, 201);

    ModelParams with_rate = kBase;
    with_rate.r = 0.02;
    CHECK_THROWS_MATCHES(solve_pricing(with_rate, call, g, kT), std::invalid_argument,
                         Catch::Matchers::MessageMatches(ContainsSubstring("r = 0")));

    CHECK_THROWS_AS(solve_pricing(kBase, call, g, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_pricing(kBase, call, g, -1.0), std::invalid_argument);

    ModelParams off_grid = kBase;
    off_grid.zeta = 10.0 * (1.0 + 1e-7);
    CHECK_THROWS_MATCHES(solve_pricing(off_grid, call, g, kT), std::invalid_argument,
                         Catch::Matchers::MessageMatches(ContainsSubstring("grid node")));

    const Payoff bad = Payoff::constant(std::numeric_limits<double>::quiet_NaN());
    CHECK_THROWS_MATCHES(solve_pricing(kBase, bad, g, kT), std::invalid_argument,
                         Catch::Matchers::MessageMatches(ContainsSubstring("not finite")));
}

TEST_CASE("solve_pricing validates the grid spec") {
    Payoff call = Payoff::call(10.0);

    GridSpec tiny;
    tiny.x_nodes = {8.0, 9.0, 10.0, 11.0, 12.0, 13.0};
    CHECK_THROWS_AS(solve_pricing(kBase, call, tiny, kT), std::invalid_argument);

    GridSpec unsorted = default_pricing_grid(kBase, 201);
    std::swap(unsorted.x_nodes[3], unsorted.x_nodes[4]);
    CHECK_THROWS_AS(solve_pricing(kBase, call, unsorted, kT), std::invalid_argument);

    GridSpec bad_theta = default_pricing_grid(kBase, 201);
    bad_theta.theta = 1.5;
    CHECK_THROWS_AS(solve_pricing(kBase, call, bad_theta, kT), std::invalid_argument);

    GridSpec no_steps = default_pricing_grid(kBase, 201);
    no_steps.t_steps = 0;
    CHECK_THROWS_AS(solve_pricing(kBase, call, no_steps, kT), std::invalid_argument);
}

TEST_CASE("solve_pricing: rho=0 tolerates an off-grid sticky level") {
    ModelParams p = kBase;
    p.rho = 0.0;
    p.zeta = 9.87;  // no interface without stickiness, so the node is free
    GridSpec g;
    g.x_nodes = make_log_grid(10.0 / 16.0, 160.0, 501, 10.0);
    const double v = solve_pricing(p, Payoff::call(10.0), g, kT).value(0.0, 10.0);
    CHECK_THAT(v, WithinRel(bs_atm_call(10.0, 0.25, kT), 5e-3));
}

TEST_CASE("PriceSurface queries: interpolation, extrapolation, and domain errors") {
    GridSpec g = default_pricing_grid(kBase, 201);
    g.t_steps = 50;
    PriceSurface s = solve_pricing(kBase, Payoff::call(10.0), g, kT);
    const auto& x = g.x_nodes;
    const std::size_t n = x.size();

    // node value at the terminal level is the payoff itself
    CHECK(s.value(kT, x[150]) == s.values.back()[150]);

    // beyond the last node the value continues linearly (far-field closure)
    const double slope = (s.values[0][n - 1] - s.values[0][n - 2]) / (x[n - 1] - x[n - 2]);
    const double xq = x[n - 1] * 1.1;
    CHECK_THAT(s.value(0.0, xq), WithinRel(s.values[0][n - 1] + slope * (xq - x[n - 1]), 1e-12));

    CHECK_THROWS_AS(s.value(-0.5, 10.0), std::out_of_range);
    CHECK_THROWS_AS(s.value(kT * 1.01, 10.0), std::out_of_range);
    CHECK_THROWS_AS(s.value(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(s.delta_at(1.0, -2.0), std::domain_error);
}

TEST_CASE("mollify: the well carries exactly the atom's speed mass") {
    for (int n : {1, 4, 16}) {
        MollifiedModel m = mollify(kBase, n);
        CHECK_THAT(m.support_width, WithinRel(10.0 / (4.0 * n), 1e-14));
        // Simpson quadrature of the added Feller speed 2/(sigma_n^2 x^2) - 2/(sigma^2 x^2)
        const int q = 4000;
        const double a = m.zeta - m.support_width, b = m.zeta + m.support_width;
        const double h = (b - a) / q;
        double acc = 0.0;
        for (int i = 0; i <= q; ++i) {
            const double x = a + h * i;
            const double sn = m.sigma_n(x);
            const double f = 2.0 / (sn * sn * x * x) - 2.0 / (kBase.sigma * kBase.sigma * x * x);
            acc += ((i == 0 || i == q) ? 1.0 : (i % 2 ? 4.0 : 2.0)) * f;
        }
        CHECK_THAT(acc * h / 3.0, WithinAbs(kBase.rho, 1e-6));
    }
}

TEST_CASE("mollify: sigma_n is untouched outside the window and deepens like sqrt(eps)") {
    double prev_center = std::numeric_limits<double>::max();
    double prev_dev = std::numeric_limits<double>::max();
    for (int n : {1, 2, 4, 8, 16}) {
        MollifiedModel m = mollify(kBase, n);
        CHECK(m.sigma_n(m.zeta - 1.0001 * m.support_width) == kBase.sigma);
        CHECK(m.sigma_n(m.zeta + 1.0001 * m.support_width) == kBase.sigma);
        CHECK(m.sigma_n(42.0) == kBase.sigma);
        const double center = m.sigma_n(m.zeta);
        CHECK(center > 0.0);
        CHECK(center < prev_center);
        prev_center = center;
        // bump peak is 35/(32 eps), so sigma_n(zeta) -> (8/zeta) sqrt(eps/(35 rho))
        const double asym = (8.0 / m.zeta) * std::sqrt(m.support_width / (35.0 * kBase.rho));
        const double dev = std::abs(center / asym - 1.0);
        CHECK(dev < prev_dev);
        prev_dev = dev;
    }
    CHECK(prev_dev < 0.05);
}

TEST_CASE("mollify: zero stickiness leaves the volatility flat") {
    ModelParams p = kBase;
    p.rho = 0.0;
    MollifiedModel m = mollify(p, 8);
    for (double x : {9.7, 10.0, 10.3, 11.0}) CHECK(m.sigma_n(x) == p.sigma);
    CHECK_THROWS_AS(mollify(kBase, 0), std::invalid_argument);
}

TEST_CASE("solve_smooth converges to the sticky price as the well narrows") {
    Payoff call = Payoff::call(10.0);
    const double sticky =
        solve_pricing(kBase, call, default_pricing_grid(kBase), kT).value(0.0, 10.0);
    double prev_err = std::numeric_limits<double>::max();
    double final_rel = 0.0;
    for (int n : {1, 2, 4, 8, 16}) {
        MollifiedModel m = mollify(kBase, n);
        GridSpec g = resolve_window(default_pricing_grid(kBase), m, 16);
        const double v = solve_smooth(m, call, g, kT).value(0.0, 10.0);
        const double err = std::abs(v - sticky);
        CHECK(err <= prev_err * 1.10);  // nonincreasing up to 10% slack
        prev_err = err;
        final_rel = err / sticky;
    }
    CHECK(final_rel <= 0.02);
}

TEST_CASE("solve_smooth: zero stickiness reproduces solve_pricing exactly") {
    ModelParams p = kBase;
    p.rho = 0.0;
    GridSpec g = default_pricing_grid(p);
    g.t_steps = 300;
    PriceSurface a = solve_pricing(p, Payoff::call(10.0), g, kT);
    PriceSurface b = solve_smooth(mollify(p, 4), Payoff::call(10.0), g, kT);
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t k = 0; k < a.values.size(); ++k)
        for (std::size_t j = 0; j < a.values[k].size(); ++j)
            CHECK(a.values[k][j] == b.values[k][j]);
}

TEST_CASE("solve_smooth refuses an under-resolved mollification window") {
    MollifiedModel m = mollify(kBase, 16);  // eps ~ 0.156, default spacing ~ 0.055
    GridSpec g = default_pricing_grid(kBase);
    CHECK_THROWS_MATCHES(solve_smooth(m, Payoff::call(10.0), g, kT), std::invalid_argument,
                         Catch::Matchers::MessageMatches(ContainsSubstring("need >= 8")));
    GridSpec ok = resolve_window(g, m, 16);
    CHECK_NOTHROW(solve_smooth(m, Payoff::call(10.0), ok, kT));
}

TEST_CASE("write_surface_csv emits the long format with endpoint rows") {
    GridSpec g = default_pricing_grid(kBase, 41);
    g.t_steps = 4;
    PriceSurface s = solve_pricing(kBase, Payoff::call(10.0), g, kT);

    std::ostringstream full;
    write_surface_csv(s, full);
    std::istringstream in(full.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "t,x,v,dv_left,dv_right");
    std::size_t rows = 0;
    std::string last;
    while (std::getline(in, line)) {
        ++rows;
        last = line;
    }
    CHECK(rows == 5 * s.grid.x_nodes.size());
    CHECK(last.substr(0, 3) == "10,");  // final level is t = T

    // strides subsample but keep the last level and node
    std::ostringstream sub;
    write_surface_csv(s, sub, 3, 7);
    std::istringstream in2(sub.str());
    std::getline(in2, line);
    std::size_t rows2 = 0;
    bool saw_last_node = false;
    while (std::getline(in2, line)) {
        ++rows2;
        if (line.rfind("10,160", 0) == 0) saw_last_node = true;
    }
    CHECK(rows2 == 3 * 7);  // t levels {0,3,4}, x nodes {0,7,...,35,40}
    CHECK(saw_last_node);

    CHECK_THROWS_AS(write_surface_csv(s, full, 0, 1), std::invalid_argument);
}
