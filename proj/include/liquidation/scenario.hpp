#pragma once

// JSON scenario configs and the subcommands that turn them into tables.
//
// Every config carries a "setting" discriminator (constant_vol, stoch_vol,
// lob). Unknown keys are rejected at every level.

#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "liquidation/constant_vol.hpp"
#include "liquidation/errors.hpp"
#include "liquidation/lob.hpp"
#include "liquidation/pde.hpp"
#include "liquidation/report.hpp"
#include "liquidation/simulation.hpp"
#include "liquidation/stoch_vol.hpp"

namespace liquidation {

inline constexpr const char* kVersion = "1.0.0";

class ConfigError : public InvalidInput {
public:
    ConfigError(const std::string& field, const std::string& what)
        : InvalidInput("field '" + field + "': " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

namespace detail {

using nlohmann::json;

/// Reads fields of one JSON object and remembers which keys were consumed.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const { return obj_.contains(key); }

    const json& raw(const std::string& key) {
        used_.insert(key);
        return obj_.at(key);
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(field(key), "missing");
        }
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(field(key), "expected a number");
        return v.get<double>();
    }

    double positive(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const double x = number(key, fallback);
        if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(field(key), "must be > 0");
        return x;
    }

    double nonnegative(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const double x = number(key, fallback);
        if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError(field(key), "must be >= 0");
        return x;
    }

    std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            throw ConfigError(field(key), "expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(field(key), "missing");
        }
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(field(key), "expected a string");
        return v.get<std::string>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(field(key), "missing");
        }
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError(field(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError(field(key), "expected an array of strings");
        std::vector<std::string> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_string()) throw ConfigError(field(key) + "[" + std::to_string(i) + "]", "expected a string");
            out.push_back(v[i].get<std::string>());
        }
        return out;
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!used_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> used_;
};

}  // namespace detail

struct VenueSpec {
    std::vector<double> betas;     // empty = identical venues
    std::vector<double> eta_tems;
    std::size_t count = 1;
    double eta_tem = 0.01;

    VenueSet build(double eta_per) const {
        if (betas.empty()) return VenueSet::identical(count, eta_tem, eta_per);
        std::vector<Venue> v;
        for (std::size_t n = 0; n < betas.size(); ++n) v.push_back({betas[n], eta_tems[n]});
        return VenueSet::validate(v, eta_per);
    }
};

struct ScenarioConfig {
    std::string setting;
    nlohmann::json source;  // the parsed document, echoed into reports
    RunSettings run;

    // constant_vol
    ModelParams model;
    double eta_per = 0.005;
    double S0 = 15.0;
    std::vector<VenueSpec> venue_sets;
    std::vector<double> frontier_lambdas;
    std::size_t curve_intervals = 1000;

    // stoch_vol
    StochVolParams stoch;
    std::vector<Strategy> strategies;
    std::vector<double> residual_epsilons{0.04, 0.02, 0.01};
    double residual_nu = 0.5;
    double residual_q = 100.0;
    PdeGridSpec pde;

    // lob
    LobParams lob;
    std::size_t lob_grid_intervals = 1000;
};

namespace detail {

inline Strategy parse_strategy(const std::string& s, const std::string& field) {
    if (s == "constant_vol") return Strategy::ConstantVol;
    if (s == "moving_constant_vol") return Strategy::MovingConstantVol;
    if (s == "vol_adjusted") return Strategy::VolAdjusted;
    if (s == "mo_only") return Strategy::MoOnly;
    if (s == "market_and_limit") return Strategy::MarketAndLimit;
    throw ConfigError(field, "unknown strategy '" + s + "'");
}

inline RunSettings parse_simulation(ObjectReader& root, const RunSettings& defaults) {
    RunSettings run = defaults;
    if (!root.has("simulation")) return run;
    ObjectReader r(root.raw("simulation"), root.field("simulation"));
    run.dt = r.positive("dt", run.dt);
    run.n_paths = r.unsigned_int("paths", run.n_paths);
    if (run.n_paths < 1) throw ConfigError(r.field("paths"), "must be >= 1");
    run.seed = r.unsigned_int("seed", run.seed);
    const std::string shocks = r.string("shocks", std::string("binomial"));
    if (shocks == "binomial") {
        run.shocks = ShockKind::Binomial;
    } else if (shocks == "gaussian") {
        run.shocks = ShockKind::Gaussian;
    } else {
        throw ConfigError(r.field("shocks"), "expected 'binomial' or 'gaussian'");
    }
    run.trajectory_stride = r.unsigned_int("trajectory_stride", 0);
    r.finish();
    return run;
}

inline void parse_constant_vol(ObjectReader& r, ScenarioConfig& c) {
    c.model.Q = r.positive("Q", 100.0);
    c.model.T = r.positive("T", 1.0);
    c.model.lambda = r.nonnegative("lambda", 0.1);
    c.model.K = r.positive("K", 0.1);
    c.model.vol = ConstantVolatility{r.positive("sigma", std::numbers::e)};
    c.S0 = r.number("S0", 15.0);
    const double eta_per = r.nonnegative("eta_per", 0.005);
    if (!r.has("venue_sets")) throw ConfigError(r.field("venue_sets"), "missing");
    const auto& sets = r.raw("venue_sets");
    if (!sets.is_array() || sets.empty()) throw ConfigError(r.field("venue_sets"), "expected a non-empty array");
    for (std::size_t i = 0; i < sets.size(); ++i) {
        ObjectReader v(sets[i], r.field("venue_sets") + "[" + std::to_string(i) + "]");
        VenueSpec spec;
        if (v.has("betas")) {
            spec.betas = v.numbers("betas");
            spec.eta_tems = v.numbers("eta_tem");
            if (spec.eta_tems.size() != spec.betas.size()) {
                throw ConfigError(v.field("eta_tem"), "length differs from betas");
            }
            for (std::size_t n = 0; n < spec.eta_tems.size(); ++n) {
                if (!(spec.eta_tems[n] > 0.0)) {
                    throw ConfigError(v.field("eta_tem") + "[" + std::to_string(n) + "]", "must be > 0");
                }
            }
        } else {
            spec.count = v.unsigned_int("count", 1);
            if (spec.count < 1) throw ConfigError(v.field("count"), "must be >= 1");
            spec.eta_tem = v.positive("eta_tem", 0.01);
        }
        v.finish();
        try {
            spec.build(eta_per);
        } catch (const InvalidInput& e) {
            throw ConfigError(v.field("betas"), e.what());
        }
        c.venue_sets.push_back(std::move(spec));
    }
    c.eta_per = eta_per;
    c.frontier_lambdas = r.numbers("frontier_lambdas", std::vector<double>{});
    c.curve_intervals = r.unsigned_int("curve_intervals", 1000);
    if (c.curve_intervals < 1) throw ConfigError(r.field("curve_intervals"), "must be >= 1");
    c.run = parse_simulation(r, RunSettings{});
    step_count(c.model.T, c.run.dt);
}

inline void parse_stoch_vol(ObjectReader& r, ScenarioConfig& c) {
    StochVolParams& p = c.stoch;
    p.Q = r.positive("Q", 100.0);
    p.T = r.positive("T", 1.0);
    p.lambda = r.nonnegative("lambda", 0.1);
    p.K = r.positive("K", 0.1);
    p.eta_tem = r.positive("eta_tem", 0.01);
    p.eta_per = r.nonnegative("eta_per", 0.005);
    p.nu0 = r.number("nu0", 0.5);
    p.ou.m = r.number("m", 1.0);
    p.ou.epsilon = r.nonnegative("epsilon", 0.01);
    p.ou.xi = r.nonnegative("xi", 2.0);
    p.ou.rho = r.number("rho", -0.4);
    if (!(std::abs(p.ou.rho) < 1.0)) throw ConfigError(r.field("rho"), "must satisfy |rho| < 1");
    c.S0 = r.number("S0", 15.0);
    const auto names = r.strings("strategies", {"constant_vol", "moving_constant_vol", "vol_adjusted"});
    if (names.empty()) throw ConfigError(r.field("strategies"), "must not be empty");
    for (std::size_t i = 0; i < names.size(); ++i) {
        const std::string f = r.field("strategies") + "[" + std::to_string(i) + "]";
        const Strategy s = parse_strategy(names[i], f);
        if (s == Strategy::MoOnly || s == Strategy::MarketAndLimit) throw ConfigError(f, "not a stoch_vol strategy");
        c.strategies.push_back(s);
    }
    if (r.has("residual")) {
        ObjectReader q(r.raw("residual"), r.field("residual"));
        c.residual_epsilons = q.numbers("epsilons", c.residual_epsilons);
        if (c.residual_epsilons.size() < 3) throw ConfigError(q.field("epsilons"), "needs at least 3 values");
        for (double e : c.residual_epsilons) {
            if (!(e >= 0.0)) throw ConfigError(q.field("epsilons"), "values must be >= 0");
        }
        c.residual_nu = q.number("nu", p.nu0);
        c.residual_q = q.nonnegative("q", p.Q);
        c.pde.t_steps = q.unsigned_int("t_steps", c.pde.t_steps);
        if (c.pde.t_steps < 1) throw ConfigError(q.field("t_steps"), "must be >= 1");
        c.pde.nu_step = q.positive("nu_step", c.pde.nu_step);
        q.finish();
    } else {
        c.residual_nu = p.nu0;
        c.residual_q = p.Q;
    }
    c.run = parse_simulation(r, RunSettings{});
    try {
        p.validate();
        step_count(p.T, c.run.dt);
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw ConfigError("<stoch_vol>", e.what());
    }
}

inline void parse_lob(ObjectReader& r, ScenarioConfig& c) {
    LobParams& p = c.lob;
    p.Q = r.positive("Q", 100.0);
    if (std::floor(p.Q) != p.Q) throw ConfigError(r.field("Q"), "must be a whole number of shares");
    p.T = r.positive("T", 1.0);
    p.K = r.positive("K", 0.1);
    p.eta_tem = r.positive("eta_tem", 0.01);
    p.eta_per = r.nonnegative("eta_per", 0.005);
    p.sigma = r.nonnegative("sigma", std::numbers::e);
    p.S0 = r.number("S0", 15.0);
    p.lambda = r.nonnegative("lambda", 0.1);
    if (r.has("lambda_M")) {
        p.lambda_M_direct = r.nonnegative("lambda_M");
        if (r.has("A") || r.has("kappa")) throw ConfigError(r.field("lambda_M"), "give either lambda_M or A/kappa");
    } else {
        p.lambda_M_direct.reset();
        p.A = r.nonnegative("A");
        p.kappa = r.nonnegative("kappa", 0.0);
    }
    p.Delta = r.nonnegative("Delta", 0.3);
    p.eta_u = r.nonnegative("eta_u", 0.02);
    p.eta_d = r.nonnegative("eta_d", 0.02);
    p.eta_I = r.nonnegative("eta_I", 0.02);
    p.adverse_selection = r.boolean("adverse_selection", true);
    const auto names = r.strings("strategies", {"market_and_limit", "mo_only"});
    if (names.empty()) throw ConfigError(r.field("strategies"), "must not be empty");
    for (std::size_t i = 0; i < names.size(); ++i) {
        const std::string f = r.field("strategies") + "[" + std::to_string(i) + "]";
        const Strategy s = parse_strategy(names[i], f);
        if (s != Strategy::MoOnly && s != Strategy::MarketAndLimit) throw ConfigError(f, "not a lob strategy");
        c.strategies.push_back(s);
    }
    c.lob_grid_intervals = r.unsigned_int("grid_intervals", 1000);
    if (c.lob_grid_intervals < 2 || c.lob_grid_intervals % 2 != 0) {
        throw ConfigError(r.field("grid_intervals"), "must be even and >= 2");
    }
    c.run = parse_simulation(r, lob_default_run());
    try {
        p.validate();
        if (!(2.0 * p.K > p.eta_per)) throw ConfigError(r.field("K"), "2K must exceed eta_per");
        step_count(p.T, c.run.dt);
        if (p.lambda_M() * c.run.dt > 0.1) throw ConfigError("simulation.dt", "lambda_M * dt must be <= 0.1");
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw ConfigError("<lob>", e.what());
    }
}

}  // namespace detail

inline ScenarioConfig parse_config(const nlohmann::json& doc) {
    ScenarioConfig c;
    c.source = doc;
    detail::ObjectReader r(doc, "");
    c.setting = r.string("setting");
    try {
        if (c.setting == "constant_vol") {
            detail::parse_constant_vol(r, c);
        } else if (c.setting == "stoch_vol") {
            detail::parse_stoch_vol(r, c);
        } else if (c.setting == "lob") {
            detail::parse_lob(r, c);
        } else {
            throw ConfigError("setting", "expected constant_vol, stoch_vol or lob, got '" + c.setting + "'");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw ConfigError("<" + c.setting + ">", e.what());
    }
    r.finish();
    return c;
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("<file>", "cannot read " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("<file>", path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
};

inline void apply_overrides(ScenarioConfig& c, const Overrides& o) {
    if (o.seed) c.run.seed = *o.seed;
    if (o.paths) {
        if (*o.paths < 1) throw ConfigError("--paths", "must be >= 1");
        c.run.n_paths = *o.paths;
    }
}

struct ReportBundle {
    std::string command;
    std::vector<Table> tables;
    nlohmann::json metadata;
    nlohmann::json extras = nlohmann::json::object();
};

namespace detail {

inline std::string venue_label(const VenueSpec& v, std::size_t index) {
    if (v.betas.empty()) return std::to_string(v.count);
    return "set" + std::to_string(index + 1) + "_N" + std::to_string(v.betas.size());
}

inline Table path_table(const std::string& name, const std::string& group_column) {
    Table t;
    t.name = name;
    t.columns = {group_column, "path", "gain_loss", "qv_penalty", "objective", "final_inventory", "fills"};
    return t;
}

inline void append_paths(Table& t, const std::string& group, const MonteCarloResult& mc) {
    for (std::size_t i = 0; i < mc.paths.size(); ++i) {
        const PathResult& p = mc.paths[i];
        t.rows.push_back({group, static_cast<double>(i), p.gain_loss, p.qv_penalty, p.objective, p.final_inventory,
                          static_cast<double>(p.fills)});
    }
}

inline void require_setting(const ScenarioConfig& c, const std::string& command,
                            std::initializer_list<const char*> allowed) {
    for (const char* a : allowed) {
        if (c.setting == a) return;
    }
    throw ConfigError("setting", "subcommand '" + command + "' does not support setting '" + c.setting + "'");
}

inline ReportBundle solve_constant_vol(const ScenarioConfig& c) {
    ReportBundle b;
    Table summary;
    summary.name = "solution";
    summary.columns = {"venues", "h0", "value0", "total_rate0", "branch", "admissible", "X_T"};
    std::set<std::string> seen;
    for (std::size_t i = 0; i < c.venue_sets.size(); ++i) {
        const ConstantVolSolution sol(c.model, c.venue_sets[i].build(c.eta_per));
        Table curve = trading_curve_table(sol, c.curve_intervals);
        const std::string label = venue_label(c.venue_sets[i], i);
        curve.name = "trading_curve_" + label;
        if (!seen.insert(curve.name).second) curve.name += "_" + std::to_string(i + 1);
        double total = 0.0;
        for (double r : sol.optimal_rates(0.0, c.model.Q)) total += r;
        summary.rows.push_back({label, sol.h(0.0), sol.value(0.0, c.model.Q), total,
                                std::string(sol.branch() == Branch::Hyperbolic ? "hyperbolic" : "trigonometric"),
                                std::string(sol.admissible() ? "yes" : "no"), curve.rows.back()[1]});
        b.tables.push_back(std::move(curve));
    }
    b.tables.insert(b.tables.begin(), std::move(summary));
    return b;
}

inline ReportBundle solve_stoch_vol(const ScenarioConfig& c) {
    ReportBundle b;
    const AsymptoticSolution sol(c.stoch);
    Table t;
    t.name = "asymptotic";
    t.columns = {"t", "h0", "h1", "theta_moving_constant", "theta_corrected"};
    const std::size_t n = 100;
    for (std::size_t k = 0; k <= n; ++k) {
        const double x = k == n ? c.stoch.T : c.stoch.T * static_cast<double>(k) / static_cast<double>(n);
        t.rows.push_back({x, sol.h0(x, c.stoch.nu0), sol.h1(x, c.stoch.nu0),
                          sol.theta_moving_constant(x, c.stoch.nu0, c.stoch.Q),
                          sol.theta_corrected(x, c.stoch.nu0, c.stoch.Q)});
    }
    b.tables.push_back(std::move(t));
    return b;
}

inline Table lob_summary_table(const ScenarioConfig& c, const LobCoefficients& co) {
    const MoOnlySolution mo(c.lob);
    Table t;
    t.name = "lob_summary";
    t.columns = {"quantity", "value"};
    t.rows.push_back({std::string("lambda_M"), c.lob.lambda_M()});
    t.rows.push_back({std::string("mo_only_X_T"), mo.X_T()});
    t.rows.push_back({std::string("h0"), co.h.front()});
    t.rows.push_back({std::string("g0"), co.g.front()});
    t.rows.push_back({std::string("f0"), co.f.front()});
    t.rows.push_back({std::string("min_feasible_target"), min_feasible_target(co)});
    t.rows.push_back({std::string("horizon_bound"), lob_horizon_bound(c.lob)});
    return t;
}

inline ReportBundle solve_lob(const ScenarioConfig& c) {
    ReportBundle b;
    const LobCoefficients co = lob_coefficients(c.lob, c.lob_grid_intervals);
    const MoOnlySolution mo(c.lob);
    const std::vector<double> ex = expected_inventory_curve(co);
    Table t;
    t.name = "lob_coefficients";
    t.columns = {"t", "h", "g", "f", "expected_inventory", "mo_only_inventory"};
    for (std::size_t k = 0; k < co.t.size(); ++k) {
        t.rows.push_back({co.t[k], co.h[k], co.g[k], co.f[k], ex[k], mo.inventory(co.t[k])});
    }
    b.tables.push_back(lob_summary_table(c, co));
    b.tables.push_back(std::move(t));
    return b;
}

inline ReportBundle simulate_constant_vol(const ScenarioConfig& c) {
    ReportBundle b;
    Table t;
    t.name = "table1";
    t.columns = {"venues", "mean_gl", "std_gl", "mean_qT", "std_qT", "mean_objective"};
    Table paths = path_table("paths", "venues");
    for (std::size_t i = 0; i < c.venue_sets.size(); ++i) {
        const auto sim = make_constant_vol_sim(c.model, c.venue_sets[i].build(c.eta_per), c.S0, c.run);
        const MonteCarloResult mc = run_monte_carlo(sim);
        const std::string label = venue_label(c.venue_sets[i], i);
        t.rows.push_back({label, mc.stats.mean, mc.stats.std, mc.stats.mean_final_inventory,
                          mc.stats.std_final_inventory, mc.stats.mean_objective});
        append_paths(paths, label, mc);
    }
    b.tables.push_back(std::move(t));
    b.tables.push_back(std::move(paths));
    return b;
}

inline ReportBundle simulate_stoch_vol(const ScenarioConfig& c) {
    ReportBundle b;
    Table t;
    t.name = "table2";
    t.columns = {"statistic"};
    Table paths = path_table("paths", "strategy");
    std::vector<EnsembleStats> stats;
    for (Strategy s : c.strategies) {
        const MonteCarloResult mc = run_monte_carlo(make_stoch_vol_sim(c.stoch, c.S0, s, c.run));
        t.columns.push_back(strategy_name(s));
        stats.push_back(mc.stats);
        append_paths(paths, strategy_name(s), mc);
    }
    auto row = [&](const char* name, double EnsembleStats::*field) {
        std::vector<Cell> r{std::string(name)};
        for (const auto& s : stats) r.emplace_back(s.*field);
        t.rows.push_back(std::move(r));
    };
    row("mean", &EnsembleStats::mean);
    row("std", &EnsembleStats::std);
    row("skewness", &EnsembleStats::skewness);
    row("kurtosis", &EnsembleStats::kurtosis);
    row("mean_objective", &EnsembleStats::mean_objective);
    row("mean_qT", &EnsembleStats::mean_final_inventory);
    b.tables.push_back(std::move(t));
    b.tables.push_back(std::move(paths));
    return b;
}

inline ReportBundle simulate_lob(const ScenarioConfig& c) {
    ReportBundle b;
    const LobCoefficients co = lob_coefficients(c.lob, c.lob_grid_intervals);
    Table t;
    t.name = "lob_pl";
    t.columns = {"strategy", "mean_pl", "std_pl", "skewness", "kurtosis", "mean_objective", "mean_qT", "mean_fills"};
    Table paths = path_table("paths", "strategy");
    for (Strategy s : c.strategies) {
        const MonteCarloResult mc = run_monte_carlo(make_lob_sim(c.lob, s, c.run));
        double fills = 0.0;
        for (const auto& p : mc.paths) fills += static_cast<double>(p.fills);
        fills /= static_cast<double>(mc.paths.size());
        t.rows.push_back({std::string(strategy_name(s)), mc.stats.mean, mc.stats.std, mc.stats.skewness,
                          mc.stats.kurtosis, mc.stats.mean_objective, mc.stats.mean_final_inventory, fills});
        append_paths(paths, strategy_name(s), mc);
    }
    b.tables.push_back(lob_summary_table(c, co));
    b.tables.push_back(std::move(t));
    b.tables.push_back(std::move(paths));
    return b;
}

inline ReportBundle frontier_constant_vol(const ScenarioConfig& c) {
    ReportBundle b;
    std::vector<double> grid = c.frontier_lambdas;
    if (grid.empty()) grid = {0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0};
    const auto points = efficient_frontier(grid, c.model, c.venue_sets.front().build(c.eta_per), c.S0, c.run);
    b.tables.push_back(frontier_table(points));
    return b;
}

inline ReportBundle residual_stoch_vol(const ScenarioConfig& c) {
    ReportBundle b;
    const ResidualStudy study = residual_order_study(c.stoch, c.residual_epsilons, c.residual_nu, c.residual_q, c.pde);
    Table t;
    t.name = "residual";
    t.columns = {"epsilon", "residual"};
    for (std::size_t i = 0; i < study.epsilons.size(); ++i) t.rows.push_back({study.epsilons[i], study.residuals[i]});
    Table fit;
    fit.name = "residual_fit";
    fit.columns = {"slope"};
    fit.rows.push_back({study.slope});
    b.tables.push_back(std::move(t));
    b.tables.push_back(std::move(fit));
    return b;
}

}  // namespace detail

inline ReportBundle run_command(const std::string& command, const ScenarioConfig& c) {
    ReportBundle b;
    if (command == "solve") {
        if (c.setting == "constant_vol") b = detail::solve_constant_vol(c);
        else if (c.setting == "stoch_vol") b = detail::solve_stoch_vol(c);
        else b = detail::solve_lob(c);
    } else if (command == "simulate") {
        if (c.setting == "constant_vol") b = detail::simulate_constant_vol(c);
        else if (c.setting == "stoch_vol") b = detail::simulate_stoch_vol(c);
        else b = detail::simulate_lob(c);
    } else if (command == "frontier") {
        detail::require_setting(c, command, {"constant_vol"});
        b = detail::frontier_constant_vol(c);
    } else if (command == "residual") {
        detail::require_setting(c, command, {"stoch_vol"});
        b = detail::residual_stoch_vol(c);
    } else if (command == "lob") {
        detail::require_setting(c, command, {"lob"});
        b = detail::simulate_lob(c);
    } else {
        throw ConfigError("<command>", "unknown subcommand '" + command + "'");
    }
    b.command = command;
    b.metadata = {{"command", command},
                  {"setting", c.setting},
                  {"seed", c.run.seed},
                  {"paths", c.run.n_paths},
                  {"dt", c.run.dt},
                  {"version", kVersion},
                  {"config", c.source}};
    return b;
}

/// One CSV per table plus <command>.json holding metadata and every table.
inline std::vector<std::filesystem::path> write_bundle(const ReportBundle& b, const std::filesystem::path& dir,
                                                       bool with_timestamp = true) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    nlohmann::json doc;
    doc["metadata"] = b.metadata;
    if (with_timestamp) {
        const std::time_t now = std::time(nullptr);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        doc["metadata"]["timestamp"] = buf;
    }
    doc["tables"] = nlohmann::json::array();
    for (const Table& t : b.tables) {
        const auto path = dir / (t.name + ".csv");
        write_text_file(path, to_csv(t));
        written.push_back(path);
        doc["tables"].push_back(to_json(t));
    }
    if (!b.extras.empty()) doc["extras"] = b.extras;
    const auto path = dir / (b.command + ".json");
    write_text_file(path, doc.dump(2) + "\n");
    written.push_back(path);
    return written;
}

}  // namespace liquidation
