#pragma once

// Monte Carlo paths for the three settings: constant volatility across venues,
// slow OU volatility with three single-venue strategies, and the limit-order
// book. Rates are evaluated at left grid points; the leftover inventory is
// cleared at T- under the linear penalty.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "liquidation/constant_vol.hpp"
#include "liquidation/errors.hpp"
#include "liquidation/lob.hpp"
#include "liquidation/market_core.hpp"
#include "liquidation/parallel.hpp"
#include "liquidation/random.hpp"
#include "liquidation/stats.hpp"
#include "liquidation/stoch_vol.hpp"

namespace liquidation {

enum class Strategy { ConstantVol, MovingConstantVol, VolAdjusted, MoOnly, MarketAndLimit };
enum class ShockKind { Binomial, Gaussian };

inline const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::ConstantVol: return "constant_vol";
        case Strategy::MovingConstantVol: return "moving_constant_vol";
        case Strategy::VolAdjusted: return "vol_adjusted";
        case Strategy::MoOnly: return "mo_only";
        case Strategy::MarketAndLimit: return "market_and_limit";
    }
    return "?";
}

struct RunSettings {
    double dt = 1e-3;
    std::size_t n_paths = 1000;
    std::uint64_t seed = 20240917;
    ShockKind shocks = ShockKind::Binomial;
    std::size_t trajectory_stride = 0;  // 0 = no trajectory
    int threads = -1;                   // -1 = LIQUIDATOR_THREADS
};

struct TrajectoryPoint {
    double t = 0.0;
    double inventory = 0.0;
    double price = 0.0;
    double rate = 0.0;
    double factor = std::numeric_limits<double>::quiet_NaN();
};

struct PathResult {
    double gain_loss = 0.0;
    double cash = 0.0;            // cash before the terminal clearing
    double terminal_value = 0.0;  // X_T (S_T - K X_T)
    double quadratic_variation = 0.0;
    double qv_penalty = 0.0;
    double objective = 0.0;
    double final_inventory = 0.0;
    std::size_t fills = 0;
    std::vector<TrajectoryPoint> trajectory;
};

inline std::size_t step_count(double T, double dt) {
    if (!(dt > 0.0)) throw InvalidInput("dt must be > 0");
    const double ratio = T / dt;
    const double whole = std::round(ratio);
    if (whole < 1.0 || std::abs(ratio - whole) > 1e-9 * std::max(1.0, ratio)) {
        throw InvalidInput("T/dt = " + std::to_string(ratio) + " is not a whole number of steps");
    }
    return static_cast<std::size_t>(whole);
}

inline void validate_run(const RunSettings& run, double T) {
    step_count(T, run.dt);
    if (run.n_paths < 1) throw InvalidInput("n_paths must be >= 1");
}

namespace detail {

inline double draw_shock(Stream& s, ShockKind kind) { return kind == ShockKind::Binomial ? s.sign() : s.gaussian(); }

inline void finish_path(PathResult& r, double Q, double S0, double S, double X, double K, double lambda) {
    r.final_inventory = X;
    r.terminal_value = terminal_liquidation_value(X, S, K);
    r.gain_loss = r.cash + r.terminal_value - Q * S0;
    r.qv_penalty = lambda * r.quadratic_variation;
    r.objective = r.gain_loss - r.qv_penalty;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Constant volatility, N venues

/// Fills per-venue rates for (t, inventory).
using RatePolicy = std::function<void(double, double, std::span<double>)>;

struct ConstantVolSim {
    ModelParams params;
    VenueSet venues;
    double S0 = 15.0;
    RunSettings run;
    RatePolicy policy;
};

inline RatePolicy optimal_policy(std::shared_ptr<const ConstantVolSolution> sol) {
    return [sol](double t, double q, std::span<double> out) { sol->optimal_rates(t, q, out); };
}

/// Same total rate every step, split by beta.
inline RatePolicy fixed_rate_policy(const VenueSet& venues, double total_rate) {
    std::vector<double> split(venues.size());
    for (std::size_t n = 0; n < venues.size(); ++n) split[n] = venues[n].beta * total_rate;
    return [split](double, double, std::span<double> out) { std::copy(split.begin(), split.end(), out.begin()); };
}

inline ConstantVolSim make_constant_vol_sim(const ModelParams& params, const VenueSet& venues, double S0,
                                            const RunSettings& run) {
    auto sol = std::make_shared<const ConstantVolSolution>(params, venues);
    validate_run(run, params.T);
    return ConstantVolSim{params, venues, S0, run, optimal_policy(std::move(sol))};
}

inline PathResult simulate_constant_vol_path(const ConstantVolSim& sim, std::uint64_t path_index) {
    const ModelParams& p = sim.params;
    const auto* vol = std::get_if<ConstantVolatility>(&p.vol);
    if (vol == nullptr) throw InvalidInput("constant-vol path needs a ConstantVolatility model");
    const double sigma = vol->sigma;
    const double dt = sim.run.dt;
    const std::size_t steps = step_count(p.T, dt);
    const double sq = std::sqrt(dt);
    const VenueSet& v = sim.venues;
    Stream price(sim.run.seed, path_index, Channel::Price);

    PathResult r;
    std::vector<double> rates(v.size());
    double X = p.Q, S = sim.S0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = dt * static_cast<double>(k);
        sim.policy(t, X, rates);
        double total = 0.0;
        for (double& x : rates) {
            x = std::max(x, 0.0);
            total += x;
        }
        if (total * dt > X) {
            const double scale = X / (total * dt);
            for (double& x : rates) x *= scale;
            total *= scale;
        }
        if (sim.run.trajectory_stride != 0 && k % sim.run.trajectory_stride == 0) {
            r.trajectory.push_back({t, X, S, total});
        }
        r.quadratic_variation += sigma * sigma * X * X * dt;
        for (std::size_t n = 0; n < v.size(); ++n) {
            r.cash += execution_price(S, v[n].eta_tem, rates[n]) * rates[n] * dt;
        }
        X = std::max(X - total * dt, 0.0);
        S -= permanent_drift(v, rates) * dt;
        S += sigma * sq * detail::draw_shock(price, sim.run.shocks);
    }
    if (sim.run.trajectory_stride != 0) r.trajectory.push_back({p.T, X, S, 0.0});
    detail::finish_path(r, p.Q, sim.S0, S, X, p.K, p.lambda);
    return r;
}

inline PathResult simulate_path(const ConstantVolSim& sim, std::uint64_t i) { return simulate_constant_vol_path(sim, i); }

// ---------------------------------------------------------------------------
// Slow OU stochastic volatility, single venue

struct StochVolSim {
    StochVolParams params;
    double S0 = 15.0;
    Strategy strategy = Strategy::MovingConstantVol;
    RunSettings run;
    std::shared_ptr<const AsymptoticSolution> asym;
    std::shared_ptr<const H1Table> h1;  // VolAdjusted only
};

inline StochVolSim make_stoch_vol_sim(const StochVolParams& params, double S0, Strategy strategy,
                                      const RunSettings& run) {
    if (strategy != Strategy::ConstantVol && strategy != Strategy::MovingConstantVol &&
        strategy != Strategy::VolAdjusted) {
        throw InvalidInput(std::string("strategy ") + strategy_name(strategy) + " is not a stochastic-vol strategy");
    }
    validate_run(run, params.T);
    StochVolSim sim{params, S0, strategy, run, std::make_shared<const AsymptoticSolution>(params), nullptr};
    if (strategy == Strategy::VolAdjusted && params.ou.epsilon > 0.0) {
        std::size_t n = step_count(params.T, run.dt);
        if (n % 2 != 0) n *= 2;
        const GaussianMoments mo = ou_transition(params.nu0, params.T, params.ou);
        const double w = 8.0 * std::max(std::sqrt(mo.variance), 0.05) + std::abs(mo.mean - params.nu0);
        sim.h1 = std::make_shared<const H1Table>(sim.asym->tabulate_h1(n, params.nu0 - w, params.nu0 + w, 0.01));
    }
    return sim;
}

inline PathResult simulate_stoch_vol_path(const StochVolSim& sim, std::uint64_t path_index) {
    const StochVolParams& p = sim.params;
    const OUParams& ou = p.ou;
    const double dt = sim.run.dt;
    const std::size_t steps = step_count(p.T, dt);
    const double sq = std::sqrt(dt);
    const double vol_scale = ou.xi * std::sqrt(ou.epsilon);
    const double rho_bar = std::sqrt(1.0 - ou.rho * ou.rho);
    Stream price(sim.run.seed, path_index, Channel::Price);
    Stream factor(sim.run.seed, path_index, Channel::Factor);

    PathResult r;
    double X = p.Q, S = sim.S0, nu = p.nu0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = dt * static_cast<double>(k);
        double rate = 0.0;
        switch (sim.strategy) {
            case Strategy::ConstantVol: rate = sim.asym->theta_moving_constant(t, p.nu0, X); break;
            case Strategy::MovingConstantVol: rate = sim.asym->theta_moving_constant(t, nu, X); break;
            default:
                rate = sim.asym->theta_moving_constant(t, nu, X);
                if (sim.h1) rate -= ou.epsilon / p.eta_tem * sim.h1->at(t, nu) * X;
                break;
        }
        rate = std::clamp(rate, 0.0, X / dt);
        const double sigma = ou.phi(nu);
        if (sim.run.trajectory_stride != 0 && k % sim.run.trajectory_stride == 0) {
            r.trajectory.push_back({t, X, S, rate, nu});
        }
        r.quadratic_variation += sigma * sigma * X * X * dt;
        r.cash += execution_price(S, p.eta_tem, rate) * rate * dt;
        X = std::max(X - rate * dt, 0.0);
        S -= p.eta_per * rate * dt;
        const double w = detail::draw_shock(price, sim.run.shocks);
        const double z = detail::draw_shock(factor, sim.run.shocks);
        S += sigma * sq * w;
        nu += ou.epsilon * (ou.m - nu) * dt + vol_scale * (ou.rho * w + rho_bar * z) * sq;
    }
    if (sim.run.trajectory_stride != 0) r.trajectory.push_back({p.T, X, S, 0.0, nu});
    detail::finish_path(r, p.Q, sim.S0, S, X, p.K, p.lambda);
    return r;
}

inline PathResult simulate_path(const StochVolSim& sim, std::uint64_t i) { return simulate_stoch_vol_path(sim, i); }

// ---------------------------------------------------------------------------
// Limit-order book, single venue, risk-neutral strategies

struct LobSim {
    LobParams params;
    Strategy strategy = Strategy::MarketAndLimit;
    RunSettings run;
    std::shared_ptr<const LobCoefficients> coeffs;  // MarketAndLimit only
};

inline RunSettings lob_default_run() {
    RunSettings run;
    run.dt = 1e-4;
    return run;
}

inline LobSim make_lob_sim(const LobParams& params, Strategy strategy, const RunSettings& run) {
    params.validate();
    if (strategy != Strategy::MoOnly && strategy != Strategy::MarketAndLimit) {
        throw InvalidInput(std::string("strategy ") + strategy_name(strategy) + " is not a limit-order-book strategy");
    }
    validate_run(run, params.T);
    if (params.lambda_M() * run.dt > 0.1) {
        throw InvalidInput("lambda_M * dt = " + std::to_string(params.lambda_M() * run.dt) + " exceeds 0.1");
    }
    detail::require_penalty(params);
    LobSim sim{params, strategy, run, nullptr};
    if (strategy == Strategy::MarketAndLimit) sim.coeffs = std::make_shared<const LobCoefficients>(lob_coefficients(params));
    return sim;
}

inline PathResult simulate_lob_path(const LobSim& sim, std::uint64_t path_index) {
    const LobParams& p = sim.params;
    const double dt = sim.run.dt;
    const std::size_t steps = step_count(p.T, dt);
    const double sq = std::sqrt(dt);
    const double lm = p.lambda_M();
    const bool with_limits = sim.strategy == Strategy::MarketAndLimit;
    Stream price(sim.run.seed, path_index, Channel::Price);
    Stream arrival(sim.run.seed, path_index, Channel::Arrival);
    Stream adverse(sim.run.seed, path_index, Channel::Adverse);

    PathResult r;
    double X = p.Q, S = p.S0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = dt * static_cast<double>(k);
        double rate = with_limits ? theta_ml(t, X, *sim.coeffs) : theta_mo(t, X, p);
        rate = std::clamp(rate, 0.0, X / dt);
        if (sim.run.trajectory_stride != 0 && k % sim.run.trajectory_stride == 0) {
            r.trajectory.push_back({t, X, S, rate});
        }
        r.quadratic_variation += p.sigma * p.sigma * X * X * dt;
        bool filled = false;
        if (with_limits && arrival.bernoulli(lm * dt) && X >= 1.0) {
            filled = true;
            X -= 1.0;
            r.cash += S + p.Delta;
            S += p.eta_I;
            ++r.fills;
        }
        if (!filled) {
            r.cash += execution_price(S, p.eta_tem, rate) * rate * dt;
            X = std::max(X - rate * dt, 0.0);
            S -= p.eta_per * rate * dt;
            if (p.adverse_selection && adverse.bernoulli(adverse_jump_prob(lm, p.eta_u, p.eta_d, dt, false))) {
                S -= p.eta_I;
            }
        }
        if (X < 0.0) throw InventoryUnderflow("inventory " + std::to_string(X) + " at t=" + std::to_string(t));
        S += p.sigma * sq * detail::draw_shock(price, sim.run.shocks);
    }
    if (sim.run.trajectory_stride != 0) r.trajectory.push_back({p.T, X, S, 0.0});
    detail::finish_path(r, p.Q, p.S0, S, X, p.K, p.lambda);
    return r;
}

inline PathResult simulate_path(const LobSim& sim, std::uint64_t i) { return simulate_lob_path(sim, i); }

// ---------------------------------------------------------------------------
// Ensembles

struct MonteCarloResult {
    std::vector<PathResult> paths;  // in path-index order
    EnsembleStats stats;            // of gain_loss, plus objective and inventory summaries
};

inline EnsembleStats ensemble_stats(std::span<const PathResult> paths) {
    std::vector<double> gl(paths.size()), inv(paths.size());
    double obj = 0.0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        gl[i] = paths[i].gain_loss;
        inv[i] = paths[i].final_inventory;
        obj += paths[i].objective;
    }
    EnsembleStats s = summary_stats_lenient(gl);
    const EnsembleStats si = summary_stats_lenient(inv);
    s.mean_objective = paths.empty() ? std::numeric_limits<double>::quiet_NaN() : obj / static_cast<double>(paths.size());
    s.mean_final_inventory = si.mean;
    s.std_final_inventory = si.std;
    return s;
}

template <class Sim>
MonteCarloResult run_monte_carlo(const Sim& sim) {
    MonteCarloResult out;
    out.paths.resize(sim.run.n_paths);
    parallel_for(sim.run.n_paths, worker_count(sim.run.threads),
                 [&](std::size_t i) { out.paths[i] = simulate_path(sim, static_cast<std::uint64_t>(i)); });
    out.stats = ensemble_stats(out.paths);
    return out;
}

struct FrontierPoint {
    double lambda = 0.0;
    double std_gl = 0.0;
    double mean_gl = 0.0;
    double mean_objective = 0.0;
    double stderr_gl = 0.0;
};

/// One ensemble per risk aversion, all on the same seed.
inline std::vector<FrontierPoint> efficient_frontier(std::span<const double> lambda_grid, const ModelParams& base,
                                                     const VenueSet& venues, double S0, const RunSettings& run) {
    if (lambda_grid.size() < 2) throw InvalidInput("frontier needs at least two lambda values");
    if (!std::is_sorted(lambda_grid.begin(), lambda_grid.end())) throw InvalidInput("lambda grid must be ascending");
    if (std::find(lambda_grid.begin(), lambda_grid.end(), 0.0) == lambda_grid.end()) {
        throw InvalidInput("lambda grid must include 0");
    }
    std::vector<FrontierPoint> out;
    for (double lam : lambda_grid) {
        ModelParams p = base;
        p.lambda = lam;
        const MonteCarloResult mc = run_monte_carlo(make_constant_vol_sim(p, venues, S0, run));
        out.push_back({lam, mc.stats.std, mc.stats.mean, mc.stats.mean_objective,
                       mc.stats.std / std::sqrt(static_cast<double>(mc.paths.size()))});
    }
    return out;
}

}  // namespace liquidation
