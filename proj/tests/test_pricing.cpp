#include "catch2/catch_amalgamated.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "stickybs/pricing.hpp"

using namespace stickybs;

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const ModelParams kBase{0.0, 0.25, 1.0, 10.0, 0.0};  // mu sigma rho zeta r
}

TEST_CASE("bs_call_price: reference value and limits") {
    CHECK_THAT(bs_call_price(10.0, 10.0, 10.0, 0.25), WithinAbs(3.073, 1e-3));
    // at the money the closed form collapses to s0 (2 Phi(sigma sqrt(T)/2) - 1)
    const double d1 = 0.5 * 0.25 * std::sqrt(10.0);
    CHECK_THAT(bs_call_price(10.0, 10.0, 10.0, 0.25),
               WithinRel(10.0 * (2.0 * norm_cdf(d1) - 1.0), 1e-12));

    // T -> 0 recovers the payoff
    CHECK_THAT(bs_call_price(12.0, 10.0, 1e-12, 0.25), WithinAbs(2.0, 1e-9));
    CHECK_THAT(bs_call_price(8.0, 10.0, 1e-12, 0.25), WithinAbs(0.0, 1e-12));

    // K -> 0 recovers the spot
    CHECK_THAT(bs_call_price(10.0, 1e-12, 10.0, 0.25), WithinAbs(10.0, 1e-9));
}

TEST_CASE("bs_call_price and bs_call_delta reject nonpositive inputs") {
    CHECK_THROWS_AS(bs_call_price(0.0, 10.0, 1.0, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(bs_call_price(10.0, -1.0, 1.0, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(bs_call_price(10.0, 10.0, 0.0, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(bs_call_price(10.0, 10.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(bs_call_delta(10.0, 10.0, 0.0, 0.25), std::invalid_argument);
}

TEST_CASE("bs_call_delta: at-the-money value, monotone in spot") {
    const double atm = bs_call_delta(10.0, 10.0, 10.0, 0.25);
    CHECK_THAT(atm, WithinRel(norm_cdf(0.5 * 0.25 * std::sqrt(10.0)), 1e-12));
    CHECK(bs_call_delta(8.0, 10.0, 10.0, 0.25) < atm);
    CHECK(atm < bs_call_delta(12.0, 10.0, 10.0, 0.25));
    CHECK(bs_call_delta(200.0, 10.0, 1.0, 0.25) > 0.999);
}

TEST_CASE("price_mc: sticky call lands on the published values") {
    Payoff call = Payoff::call(10.0);
    ModelParams p = kBase;
    McEstimate e1 = price_mc(p, call, 10.0, 10.0, 10000, 2024);
    CHECK(std::abs(e1.mean - 2.436) <= 3.0 * e1.std_error);
    CHECK(e1.n_paths == 10000);
    CHECK(e1.seed == 2024);
    CHECK(e1.scheme == Scheme::time_change);

    p.rho = 2.0;
    McEstimate e2 = price_mc(p, call, 10.0, 10.0, 10000, 2024);
    CHECK(std::abs(e2.mean - 1.997) <= 3.0 * e2.std_error);
    CHECK(e2.mean < e1.mean);  // stickier is cheaper
}

TEST_CASE("price_mc: rho=0 exact scheme agrees with the closed form") {
    ModelParams p = kBase;
    p.rho = 0.0;
    for (auto [strike, T, sigma] : {std::tuple{10.0, 10.0, 0.25},
                                    std::tuple{12.0, 5.0, 0.3},
                                    std::tuple{8.0, 2.0, 0.2}}) {
        ModelParams q = p;
        q.sigma = sigma;
        McEstimate e = price_mc(q, Payoff::call(strike), 10.0, T, 100000, 7, Scheme::gbm_exact);
        CHECK(std::abs(e.mean - bs_call_price(10.0, strike, T, sigma)) <= 3.0 * e.std_error);
    }
}

TEST_CASE("price_mc: chain scheme agrees with the time-change scheme") {
    Payoff call = Payoff::call(10.0);
    McEstimate tc = price_mc(kBase, call, 10.0, 10.0, 5000, 99, Scheme::time_change);
    McEstimate ch = price_mc(kBase, call, 10.0, 10.0, 5000, 99, Scheme::stmca);
    const double se = std::hypot(tc.std_error, ch.std_error);
    CHECK(std::abs(tc.mean - ch.mean) <= 3.0 * se);
}

TEST_CASE("price_mc: constant payoff is exact with zero standard error") {
    McEstimate e = price_mc(kBase, Payoff::constant(2.5), 10.0, 10.0, 64, 5);
    CHECK(e.mean == 2.5);
    CHECK(e.std_error == 0.0);
}

TEST_CASE("price_mc is deterministic in (seed, scheme)") {
    Payoff call = Payoff::call(10.0);
    McEstimate a = price_mc(kBase, call, 10.0, 10.0, 200, 42);
    McEstimate b = price_mc(kBase, call, 10.0, 10.0, 200, 42);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    McEstimate c = price_mc(kBase, call, 10.0, 10.0, 200, 43);
    CHECK(a.mean != c.mean);
}

TEST_CASE("price_mc propagates input errors") {
    Payoff call = Payoff::call(10.0);
    ModelParams with_rate = kBase;
    with_rate.r = 0.01;
    CHECK_THROWS_MATCHES(price_mc(with_rate, call, 10.0, 10.0, 10, 1), std::invalid_argument,
                         Catch::Matchers::MessageMatches(ContainsSubstring("ELMM")));
    CHECK_THROWS_AS(price_mc(kBase, call, 10.0, 10.0, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(price_mc(kBase, call, 0.0, 10.0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(price_mc(kBase, call, 10.0, 0.0, 10, 1), std::invalid_argument);
    // exact GBM sampler refuses sticky dynamics
    CHECK_THROWS_AS(price_mc(kBase, call, 10.0, 10.0, 10, 1, Scheme::gbm_exact),
                    std::invalid_argument);
}

TEST_CASE("martingale_check: sticky terminal mean stays at the spot") {
    McEstimate e = martingale_check(kBase, 10.0, 10.0, 10000, 31);
    CHECK(std::abs(e.mean) <= 3.0 * e.std_error);
    CHECK(e.scheme == Scheme::time_change);
}

TEST_CASE("martingale_check: vanishing volatility pins the path") {
    ModelParams p = kBase;
    p.sigma = 1e-200;
    McEstimate e = martingale_check(p, 10.0, 10.0, 50, 1);
    CHECK(e.mean == 0.0);
    CHECK(e.std_error == 0.0);
}

TEST_CASE("martingale_check: rho=0 uses the exact lognormal sampler") {
    ModelParams p = kBase;
    p.rho = 0.0;
    McEstimate e = martingale_check(p, 10.0, 10.0, 100000, 17);
    CHECK(e.scheme == Scheme::gbm_exact);
    CHECK(std::abs(e.mean) <= 3.0 * e.std_error);
}

TEST_CASE("monotonicity_suite: published ordering across rho, growth in T") {
    MonotonicityReport rep =
        monotonicity_suite(kBase, Payoff::call(10.0), 10.0, {0.0, 1.0, 5.0, 10.0}, {0.0, 1.0, 2.0});
    REQUIRE(rep.prices.size() == 3);
    REQUIRE(rep.prices[0].size() == 4);
    CHECK(rep.all_pass);

    // T = 0 column is the payoff at the spot
    for (std::size_t i = 0; i < 3; ++i) CHECK(rep.prices[i][0] == 0.0);

    // the T = 10 column reproduces the published premiums
    CHECK_THAT(rep.prices[0][3], WithinAbs(3.0736, 0.01));
    CHECK_THAT(rep.prices[1][3], WithinAbs(2.4500, 0.01));
    CHECK_THAT(rep.prices[2][3], WithinAbs(2.0043, 0.01));
    CHECK(rep.prices[0][3] >= rep.prices[1][3]);
    CHECK(rep.prices[1][3] >= rep.prices[2][3]);

    // nondecreasing in maturity for each rho
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j + 1 < 4; ++j) CHECK(rep.prices[i][j] <= rep.prices[i][j + 1] + 1e-9);

    // every check carries a named parameter point and a positive tolerance
    REQUIRE(!rep.checks.empty());
    for (const CheckResult& c : rep.checks) {
        CHECK(!c.parameter_point.empty());
        CHECK(c.tolerance > 0.0);
        CHECK(c.pass);
    }
}

TEST_CASE("monotonicity_suite refuses non-convex payoffs and empty grids") {
    Payoff bumpy = Payoff::custom({1.0, 2.0, 3.0}, {0.0, 1.0, 0.0});
    CHECK_THROWS_MATCHES(monotonicity_suite(kBase, bumpy, 10.0, {1.0}, {0.0}),
                         std::invalid_argument,
                         Catch::Matchers::MessageMatches(ContainsSubstring("convex")));
    CHECK_THROWS_AS(monotonicity_suite(kBase, Payoff::call(10.0), 10.0, {}, {1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(monotonicity_suite(kBase, Payoff::call(10.0), 10.0, {1.0}, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(monotonicity_suite(kBase, Payoff::call(10.0), 10.0, {-1.0}, {1.0}),
                    std::invalid_argument);
}

TEST_CASE("kernel_time_derivative: density integrates to one in y") {
    const double t = 3.0, x = 10.0, mu = 0.1, sigma = 0.25;
    const double b = mu - 0.5 * sigma * sigma;
    const double lo = std::log(x) + b * t - 8.0 * sigma * std::sqrt(t);
    const double hi = std::log(x) + b * t + 8.0 * sigma * std::sqrt(t);
    const int q = 2000;
    const double h = (hi - lo) / q;
    double acc = 0.0;
    for (int i = 0; i <= q; ++i) {
        const double u = lo + h * i;
        const double y = std::exp(u);
        const double f = kernel_time_derivative(t, x, y, mu, sigma).value * y;
        acc += ((i == 0 || i == q) ? 1.0 : (i % 2 ? 4.0 : 2.0)) * f;
    }
    CHECK_THAT(acc * h / 3.0, WithinAbs(1.0, 1e-8));
}

TEST_CASE("kernel_time_derivative matches a centered finite difference") {
    for (double mu : {0.0, 0.1}) {
        for (double t : {0.5, 2.0, 7.0}) {
            for (double y : {6.0, 10.0, 17.0}) {
                const double h = 1e-3 * t;
                const KernelPoint kp = kernel_time_derivative(t, 10.0, y, mu, 0.25);
                const double fd = (kernel_time_derivative(t + h, 10.0, y, mu, 0.25).value -
                                   kernel_time_derivative(t - h, 10.0, y, mu, 0.25).value) /
                                  (2.0 * h);
                CHECK_THAT(kp.dvalue_dt, WithinRel(fd, 1e-4));
            }
        }
    }
}

TEST_CASE("kernel_time_derivative: tail sign and near-peak sign") {
    const double x = 10.0, T = 10.0, sigma = 0.25;
    const double spread = 6.0 * sigma * std::sqrt(T);
    for (int i = 1; i <= 100; ++i) {
        const double t = T * i / 100.0;
        for (double y : {x * std::exp(spread), x * std::exp(-spread)}) {
            const KernelPoint kp = kernel_time_derivative(t, x, y, 0.0, sigma);
            // six sigmas out the density underflows at small t; the derivative
            // is then +0, so strict positivity applies wherever value survives
            CHECK(kp.dvalue_dt >= 0.0);
            if (kp.value > 0.0) CHECK(kp.dvalue_dt > 0.0);
        }
    }
    // at y = x the peak decays
    CHECK(kernel_time_derivative(0.01, x, x, 0.0, sigma).dvalue_dt < 0.0);
    CHECK(kernel_time_derivative(1.0, x, x, 0.0, sigma).dvalue_dt < 0.0);

    CHECK_THROWS_AS(kernel_time_derivative(0.0, x, x, 0.0, sigma), std::invalid_argument);
    CHECK_THROWS_AS(kernel_time_derivative(1.0, -x, x, 0.0, sigma), std::invalid_argument);
    CHECK_THROWS_AS(kernel_time_derivative(1.0, x, 0.0, 0.0, sigma), std::invalid_argument);
}

TEST_CASE("find_monotone_tail: closed-form bounds, wider with T and sigma") {
    const TailBounds b10 = find_monotone_tail(10.0, 10.0, 0.0, 0.25);
    const double bdrift = -0.5 * 0.25 * 0.25;
    const double w = std::sqrt(bdrift * bdrift * 100.0 + 0.25 * 0.25 * 10.0);
    CHECK_THAT(b10.y_hi, WithinRel(10.0 * std::exp(w), 1e-12));
    CHECK_THAT(b10.y_lo, WithinRel(10.0 * std::exp(-w), 1e-12));
    CHECK(b10.y_lo < 10.0);
    CHECK(10.0 < b10.y_hi);

    const TailBounds b1 = find_monotone_tail(10.0, 1.0, 0.0, 0.25);
    const TailBounds b5 = find_monotone_tail(10.0, 5.0, 0.0, 0.25);
    CHECK(b1.y_hi < b5.y_hi);
    CHECK(b5.y_hi < b10.y_hi);
    CHECK(b10.y_lo < b5.y_lo);
    CHECK(b5.y_lo < b1.y_lo);

    const TailBounds wide = find_monotone_tail(10.0, 10.0, 0.0, 0.5);
    CHECK(wide.y_hi > b10.y_hi);
    CHECK(wide.y_lo < b10.y_lo);

    // drifted case still passes its own sign sweep
    CHECK_NOTHROW(find_monotone_tail(10.0, 10.0, 0.1, 0.25));
    CHECK_THROWS_AS(find_monotone_tail(0.0, 10.0, 0.0, 0.25), std::invalid_argument);
}
