#pragma once

// Tabular results and their CSV / JSON / console renderings.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "liquidation/constant_vol.hpp"
#include "liquidation/errors.hpp"
#include "liquidation/simulation.hpp"

namespace liquidation {

using Cell = std::variant<std::string, double>;

struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out += ',';
        out += t.columns[c];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            if (const auto* s = std::get_if<std::string>(&row[c])) {
                out += *s;
            } else {
                out += format_number(std::get<double>(row[c]));
            }
        }
        out += '\n';
    }
    return out;
}

inline nlohmann::json to_json(const Table& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& cell : row) {
            if (const auto* s = std::get_if<std::string>(&cell)) {
                r.push_back(*s);
            } else {
                const double x = std::get<double>(cell);
                if (std::isfinite(x)) {
                    r.push_back(x);
                } else {
                    r.push_back(format_number(x));
                }
            }
        }
        rows.push_back(std::move(r));
    }
    return {{"name", t.name}, {"columns", t.columns}, {"rows", std::move(rows)}};
}

/// Fixed-width console rendering, numbers rounded to 2 decimals.
inline std::string to_console(const Table& t) {
    std::vector<std::vector<std::string>> text;
    text.push_back(t.columns);
    for (const auto& row : t.rows) {
        std::vector<std::string> line;
        for (const auto& cell : row) {
            if (const auto* s = std::get_if<std::string>(&cell)) {
                line.push_back(*s);
            } else {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.2f", std::get<double>(cell));
                line.push_back(buf);
            }
        }
        text.push_back(std::move(line));
    }
    std::vector<std::size_t> width(t.columns.size(), 0);
    for (const auto& line : text) {
        for (std::size_t c = 0; c < line.size() && c < width.size(); ++c) width[c] = std::max(width[c], line[c].size());
    }
    std::ostringstream os;
    os << t.name << '\n';
    for (const auto& line : text) {
        for (std::size_t c = 0; c < line.size() && c < width.size(); ++c) {
            os << (c ? "  " : "") << std::string(width[c] - line[c].size(), ' ') << line[c];
        }
        os << '\n';
    }
    return os.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << content;
    if (!f) throw Error("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Standard tables

inline Table trading_curve_table(const ConstantVolSolution& sol, std::size_t intervals) {
    const TradingCurve curve = sol.inventory_trajectory(intervals);
    Table t;
    t.name = "trading_curve_N" + std::to_string(sol.venues().size());
    t.columns = {"t", "X"};
    for (std::size_t n = 0; n < sol.venues().size(); ++n) t.columns.push_back("theta_" + std::to_string(n + 1));
    for (std::size_t k = 0; k < curve.grid.size(); ++k) {
        std::vector<Cell> row{curve.grid[k], curve.inventory[k]};
        for (double r : curve.rates[k]) row.emplace_back(r);
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table frontier_table(std::span<const FrontierPoint> points) {
    if (points.size() < 2) throw InvalidInput("frontier export needs at least two points");
    Table t;
    t.name = "frontier";
    t.columns = {"lambda", "std_gl", "mean_gl", "mean_objective", "nonincreasing_ok"};
    std::vector<FrontierPoint> sorted(points.begin(), points.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto& p = sorted[i];
        // mean may rise by at most two standard errors over the previous point
        const bool ok = i == 0 || p.mean_gl <= sorted[i - 1].mean_gl + 2.0 * std::max(p.stderr_gl, sorted[i - 1].stderr_gl);
        t.rows.push_back({p.lambda, p.std_gl, p.mean_gl, p.mean_objective, ok ? 1.0 : 0.0});
    }
    return t;
}

/// Writes the trading curve CSV for a solution.
inline Table emit_trading_curve(const ConstantVolSolution& sol, std::size_t intervals,
                                const std::filesystem::path& path) {
    Table t = trading_curve_table(sol, intervals);
    write_text_file(path, to_csv(t));
    return t;
}

inline Table emit_frontier(std::span<const FrontierPoint> points, const std::filesystem::path& path) {
    Table t = frontier_table(points);
    write_text_file(path, to_csv(t));
    return t;
}

}  // namespace liquidation
