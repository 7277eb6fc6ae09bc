#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "liquidation/constant_vol.hpp"
#include "liquidation/lob.hpp"
#include "support/random_cases.hpp"

using namespace liquidation;

namespace {

ModelParams base_params(double lambda = 0.1) {
    ModelParams p;
    p.Q = 100.0;
    p.T = 1.0;
    p.lambda = lambda;
    p.K = 0.1;
    p.vol = ConstantVolatility{std::numbers::e};
    return p;
}

ConstantVolSolution single(double lambda = 0.1) {
    return ConstantVolSolution(base_params(lambda), VenueSet::identical(1, 0.01, 0.005));
}

std::vector<double> uniform_grid(double T, std::size_t n) {
    std::vector<double> g(n + 1);
    for (std::size_t k = 0; k <= n; ++k) g[k] = k == n ? T : T * static_cast<double>(k) / static_cast<double>(n);
    return g;
}

ConstantVolSolution trig_example() {
    ModelParams p = base_params(0.0);
    const std::vector<Venue> v{{0.8, 0.01}, {0.2, 0.01}};
    return ConstantVolSolution(p, VenueSet::validate(v, 0.005));
}

}  // namespace

TEST(DeltaN, SingleVenueEqualsLambdaSigmaSquared) {
    const auto sol = single();
    EXPECT_NEAR(sol.delta(), 0.1 * std::exp(2.0), 1e-15);
    EXPECT_NEAR(sol.delta(), 0.73891, 1e-5);
}

TEST(DeltaN, NeverExceedsLambdaSigmaSquared) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        const auto agg = aggregate_impacts(testing_support::random_venues(rng, 1 + i % 5, 0.01));
        EXPECT_LE(delta_N(agg, 0.1, 1.5), 0.1 * 1.5 * 1.5);
    }
}

TEST(DeltaN, NegativeWithoutRiskAversionForUnequalVenues) {
    const auto sol = trig_example();
    EXPECT_LT(sol.delta(), 0.0);
    EXPECT_EQ(sol.branch(), Branch::Trigonometric);
    EXPECT_FALSE(sol.varsigma().has_value());
}

TEST(Condition14, Examples) {
    const auto sol = single();
    const double threshold = 0.0025 + std::sqrt(0.1 * std::exp(2.0) / 100.0);
    EXPECT_NEAR(threshold, 0.08846, 1e-5);
    EXPECT_TRUE(check_condition_14(0.1, sol.aggregates(), sol.delta()));
    EXPECT_FALSE(check_condition_14(0.0, sol.aggregates(), sol.delta()));
    const double exact = sol.aggregates().b / (2.0 * sol.aggregates().a) +
                         std::sqrt(std::abs(sol.delta()) / sol.aggregates().a);
    EXPECT_FALSE(check_condition_14(exact, sol.aggregates(), sol.delta()));
    EXPECT_TRUE(sol.admissible());
}

TEST(Varsigma, InMinusOneZeroUnderCondition) {
    const auto sol = single();
    ASSERT_TRUE(sol.varsigma().has_value());
    EXPECT_GT(*sol.varsigma(), -1.0);
    EXPECT_LT(*sol.varsigma(), 0.0);
}

TEST(ClosedForm, TerminalConditionBothBranches) {
    EXPECT_EQ(single().h(1.0), -0.1);
    EXPECT_EQ(trig_example().h(1.0), -0.1);
    EXPECT_NEAR(single().h(1.0 - 1e-12), -0.1, 1e-12);
    EXPECT_NEAR(trig_example().h(1.0 - 1e-12), -0.1, 1e-10);
}

TEST(ClosedForm, PaperParamsAtZero) {
    const auto sol = single();
    const std::vector<double> grid{0.0, 1.0};
    const auto oracle = h_ode_oracle(sol, grid);
    EXPECT_NEAR(sol.h(0.0), oracle[0], 1e-10);
    EXPECT_NEAR(sol.h(0.0), -0.08846, 5e-6);
    EXPECT_EQ(h_closed_form(0.3, sol), sol.h(0.3));
}

TEST(ClosedForm, TrigonometricBranchMatchesOracle) {
    const auto sol = trig_example();
    const auto grid = uniform_grid(1.0, 99);
    const auto oracle = h_ode_oracle(sol, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(sol.h(grid[k]), oracle[k], 1e-8);
}

TEST(ClosedForm, ZeroDeltaUsesSeries) {
    ModelParams p = base_params(0.0);
    const ConstantVolSolution sol(p, VenueSet::identical(3, 0.01, 0.005));
    EXPECT_LT(std::abs(sol.delta()), kDeltaZeroThreshold);
    EXPECT_EQ(sol.branch(), Branch::Hyperbolic);
    const auto grid = uniform_grid(1.0, 50);
    const auto oracle = h_ode_oracle(sol, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(sol.h(grid[k]), oracle[k], 1e-10);
}

TEST(ClosedForm, TanSingularityBeyondEscapeTime) {
    ModelParams p = base_params(0.0);
    p.K = 0.05;
    const std::vector<Venue> v{{0.95, 0.001}, {0.05, 0.05}};
    const VenueSet venues = VenueSet::validate(v, 0.5);
    const ConstantVolSolution probe(p, venues);
    ASSERT_EQ(probe.branch(), Branch::Trigonometric);
    const double escape = probe.escape_time();
    ASSERT_TRUE(std::isfinite(escape));
    p.T = 2.0 * escape;
    const ConstantVolSolution sol(p, venues);
    EXPECT_THROW(sol.h(0.0), TanSingularity);
    EXPECT_NO_THROW(sol.h(p.T - 0.5 * escape));
}

TEST(ClosedForm, RandomCasesMatchOracle) {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 20; ++i) {
        const auto want = i % 2 == 0 ? testing_support::Want::Hyperbolic : testing_support::Want::Trigonometric;
        const auto c = testing_support::random_case(rng, want, false);
        const ConstantVolSolution sol(c.params, c.venues);
        const auto grid = uniform_grid(c.params.T, 40);
        const auto oracle = h_ode_oracle(sol, grid);
        for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(sol.h(grid[k]), oracle[k], 1e-8) << "case " << i;
    }
}

TEST(Oracle, SeparableCaseMatchesAnalytic) {
    ModelParams p = base_params(0.0);
    const ConstantVolSolution sol(p, VenueSet::identical(1, 0.01, 0.0));
    EXPECT_EQ(sol.aggregates().b, 0.0);
    const auto grid = uniform_grid(1.0, 20);
    const auto oracle = h_ode_oracle(sol, grid);
    const double a = 100.0, K = 0.1;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double exact = -K / (1.0 + a * K * (1.0 - grid[k]));
        EXPECT_NEAR(oracle[k], exact, 1e-10);
        EXPECT_NEAR(sol.h(grid[k]), exact, 1e-14);
    }
}

TEST(Oracle, FourthOrderUnderHalving) {
    const auto sol = single();
    auto max_err = [&](std::size_t n) {
        const auto grid = uniform_grid(1.0, n);
        const auto oracle = h_ode_oracle(sol, grid, 1.0);
        double e = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) e = std::max(e, std::abs(oracle[k] - sol.h(grid[k])));
        return e;
    };
    const double ratio = max_err(50) / max_err(100);
    EXPECT_GT(ratio, 12.0);
    EXPECT_LT(ratio, 20.0);
}

TEST(Oracle, StepTooLarge) {
    const auto sol = single();
    const std::vector<double> grid{0.0, 1.0};
    EXPECT_THROW(h_ode_oracle(sol, grid, 1.0), StepTooLarge);
}

TEST(Oracle, GridMustEndAtT) {
    const auto sol = single();
    const std::vector<double> grid{0.0, 0.5};
    EXPECT_THROW(h_ode_oracle(sol, grid), InvalidInput);
}

TEST(Rates, Examples) {
    const auto sol = single();
    for (double r : sol.optimal_rates(0.3, 0.0)) EXPECT_EQ(r, 0.0);
    const double theta = sol.optimal_rates(0.0, 100.0)[0];
    EXPECT_NEAR(theta, -(1.0 / 0.02) * (2.0 * sol.h(0.0) + 0.005) * 100.0, 1e-10);
    EXPECT_NEAR(theta, 859.6, 0.05);
    const ConstantVolSolution pair(base_params(), VenueSet::identical(2, 0.01, 0.005));
    const auto r = pair.optimal_rates(0.4, 100.0);
    EXPECT_EQ(r[0], r[1]);
    std::vector<double> bad(3);
    EXPECT_THROW(pair.optimal_rates(0.0, 1.0, bad), LengthMismatch);
}

TEST(Rates, NonnegativeAndDecreasingH) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
        const auto c = testing_support::random_case(rng, testing_support::Want::Any, true);
        const ConstantVolSolution sol(c.params, c.venues);
        double prev = sol.h(0.0);
        for (int k = 1; k <= 50; ++k) {
            const double t = c.params.T * k / 50.0;
            const double h = sol.h(t);
            EXPECT_LE(h, prev + 1e-14 * std::abs(prev));
            prev = h;
            for (std::size_t n = 0; n < c.venues.size(); ++n) {
                EXPECT_LE(2.0 * h + c.venues.eta_per() * c.venues[n].beta, 0.0);
            }
        }
    }
}

TEST(Trajectory, StartsAtQAndDecreases) {
    const auto curve = single().inventory_trajectory(2000);
    EXPECT_EQ(curve.inventory.front(), 100.0);
    for (std::size_t k = 1; k < curve.inventory.size(); ++k) EXPECT_LE(curve.inventory[k], curve.inventory[k - 1]);
    EXPECT_GT(curve.inventory.back(), 0.0);
    EXPECT_EQ(curve.grid.back(), 1.0);
}

TEST(Trajectory, TerminalInventoryMatchesOdeIntegration) {
    // X' = X * sum_n (2h + eta_per beta_n)/(2 eta_n), integrated with RK4 against the oracle h
    const auto sol = single();
    const std::size_t n = 20000;
    const auto grid = uniform_grid(1.0, n);
    const auto h = h_ode_oracle(sol, grid);
    double logx = std::log(100.0);
    const double dt = 1.0 / n;
    for (std::size_t k = 0; k < n; ++k) {
        // trapezoid on a fine grid of the oracle
        logx += 0.5 * dt * ((2.0 * h[k] + 0.005) / 0.02 + (2.0 * h[k + 1] + 0.005) / 0.02);
    }
    const double oracle_xT = std::exp(logx);
    const double xT = sol.inventory_trajectory(2000).inventory.back();
    EXPECT_NEAR(xT / oracle_xT, 1.0, 1e-3);
    // far below the 1.43 reported for N = 1
    EXPECT_LT(xT, 0.05);
    EXPECT_GT(xT, 0.0);
}

TEST(Trajectory, RiskNeutralMatchesMarketOrderOnlyCurve) {
    ModelParams p = base_params(0.0);
    const ConstantVolSolution sol(p, VenueSet::identical(1, 0.01, 0.005));
    LobParams lp;
    lp.lambda_M_direct = 0.0;
    const MoOnlySolution mo(lp);
    const auto curve = sol.inventory_trajectory(4000);
    for (std::size_t k = 0; k < curve.grid.size(); k += 400) {
        EXPECT_NEAR(curve.inventory[k], mo.inventory(curve.grid[k]), 1e-5);
        EXPECT_NEAR(sol.h(curve.grid[k]), mo.h(curve.grid[k]), 1e-12);
    }
}

TEST(Trajectory, LargePenaltyApproachesStraightLine) {
    ModelParams p = base_params(0.0);
    p.K = 1e6;
    const ConstantVolSolution sol(p, VenueSet::identical(1, 0.01, 0.005));
    const auto curve = sol.inventory_trajectory(2000);
    for (std::size_t k = 0; k < curve.grid.size(); k += 100) {
        EXPECT_NEAR(curve.inventory[k], 100.0 * (1.0 - curve.grid[k]), 1e-2);
    }
}

TEST(ValueFunction, Examples) {
    const auto sol = single();
    EXPECT_EQ(sol.value(0.2, 0.0), 0.0);
    EXPECT_NEAR(sol.value(0.0, 100.0), -884.6, 0.05);
    double prev = sol.value(0.0, 100.0);
    for (int k = 1; k <= 10; ++k) {
        const double v = sol.value(0.1 * k, 100.0);
        EXPECT_LT(v, prev);
        prev = v;
    }
    for (double T1 : {1.5, 2.0, 3.0}) {
        ModelParams p = base_params();
        p.T = T1;
        const ConstantVolSolution longer(p, VenueSet::identical(1, 0.01, 0.005));
        EXPECT_GT(longer.value(0.0, 100.0), sol.value(0.0, 100.0));
    }
}

TEST(EqualVenues, SingleVenueConsistency) {
    const auto sol = single();
    const EqualVenueInputs in;
    for (double t : {0.0, 0.3, 0.9}) {
        EXPECT_NEAR(equal_venue_rate_coefficient(t, 1, in), sol.optimal_rates(t, 1.0)[0], 1e-10);
    }
}

TEST(EqualVenues, MatchesFullSolver) {
    const EqualVenueInputs in;
    for (std::size_t n : {2u, 3u, 10u}) {
        const ConstantVolSolution sol(base_params(), VenueSet::identical(n, 0.01, 0.005));
        for (double t : {0.0, 0.5}) {
            EXPECT_NEAR(equal_venue_rate_coefficient(t, n, in), sol.optimal_rates(t, 1.0)[0], 1e-9);
        }
    }
}

TEST(EqualVenues, SquareRootLimit) {
    const EqualVenueInputs in;
    const double limit = std::sqrt(in.lambda * in.sigma * in.sigma / in.eta_tem);
    for (double t : {0.25, 0.5, 0.75}) {
        const double n = 1e4;
        const double scaled = std::sqrt(n) * equal_venue_rate_coefficient(t, 10000, in);
        EXPECT_NEAR(scaled / limit, 1.0, 0.01);
        EXPECT_LT(equal_venue_rate_coefficient(t, 10000, in), equal_venue_rate_coefficient(t, 100, in));
    }
}

TEST(EqualVenues, TotalSpeedGrows) {
    const EqualVenueInputs in;
    double prev = 0.0;
    for (std::size_t n : {1u, 10u, 100u, 1000u}) {
        const double total = static_cast<double>(n) * equal_venue_rate_coefficient(0.0, n, in);
        EXPECT_GT(total, prev);
        prev = total;
    }
    EXPECT_GT(prev, 100.0);
}

TEST(TimeConsistency, RestartReproducesRates) {
    const auto sol = single();
    const auto curve = sol.inventory_trajectory(2000);
    const std::size_t mid = 1000;
    ModelParams p = base_params();
    p.T = 0.5;
    p.Q = curve.inventory[mid];
    const ConstantVolSolution restarted(p, VenueSet::identical(1, 0.01, 0.005));
    for (std::size_t k = mid; k < curve.grid.size(); k += 50) {
        const double q = curve.inventory[k];
        const double t = curve.grid[k];
        EXPECT_NEAR(restarted.optimal_rates(t - 0.5, q)[0], sol.optimal_rates(t, q)[0],
                    1e-10 * std::max(1.0, sol.optimal_rates(t, q)[0]));
    }
}

TEST(Admissibility, RandomAnalyticTrajectories) {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 25; ++i) {
        const auto c = testing_support::random_case(rng, testing_support::Want::Any, true);
        const ConstantVolSolution sol(c.params, c.venues);
        const auto curve = sol.inventory_trajectory(testing_support::resolving_intervals(sol));
        const auto report = check_admissibility(curve.rates, c.params.Q, c.params.T);
        EXPECT_TRUE(report.nonnegative) << "case " << i;
        EXPECT_TRUE(report.consistent) << "case " << i << " integral " << report.integral << " Q " << c.params.Q << " xT " << curve.inventory.back();
    }
}

TEST(Solution, RejectsStochasticVolatility) {
    ModelParams p = base_params();
    p.vol = SlowOUVolatility{1.0, 0.01, 2.0, -0.4};
    EXPECT_THROW(ConstantVolSolution(p, VenueSet::identical(1, 0.01, 0.005)), InvalidInput);
}

TEST(Solution, FlagsViolatedCondition) {
    ModelParams p = base_params();
    p.K = 0.05;
    const ConstantVolSolution sol(p, VenueSet::identical(1, 0.01, 0.005));
    EXPECT_FALSE(sol.admissible());
    EXPECT_TRUE(std::isfinite(sol.h(0.0)));
}
