// growthscreen/report.hpp
//
// Rendering of results as CSV, JSON or Markdown. Precision is fixed: U1,
// P2S, Sharpe, Ratio and forecast at 2 decimals, TR and GP as whole
// millions. Undefined values render as an empty CSV field, JSON null, or
// "n/a" in Markdown. Negative numbers always use a minus sign.
#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "growthscreen/config.hpp"
#include "growthscreen/core.hpp"
#include "growthscreen/metrics.hpp"
#include "growthscreen/screen.hpp"

namespace growthscreen {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline std::string fmt2(double v) { return format_fixed(v, 2); }
inline std::string fmt_mio(double v) { return format_fixed(v / 1e6, 0); }

inline std::string fmt2(const std::optional<double>& v, const char* missing = "") {
    return v ? fmt2(*v) : std::string(missing);
}

/// Rounds to `decimals` places for JSON so emitted numbers match the text forms.
inline ordered_json json_num(double v, int decimals = 2) {
    const double scale = std::pow(10.0, decimals);
    double r = std::round(v * scale) / scale;
    if (r == 0.0) r = 0.0;  // drop negative zero
    if (decimals == 0) return static_cast<long long>(r);
    return r;
}

inline ordered_json json_num(const std::optional<double>& v) {
    return v ? json_num(*v) : ordered_json(nullptr);
}

inline std::string bucket_title(CapBucket b) { return std::string(to_string(b)) + "Caps"; }

}  // namespace detail

// ---------------------------------------------------------------------------
// screen
// ---------------------------------------------------------------------------

inline constexpr const char* kScreenCsvHeader =
    "symbol,u1,p2s,sharpe,tr_mio,gp_mio,ratio,p2s_fcst,bucket,flags";

inline void write_screen_csv_row(std::ostream& out, const CompanySnapshot& s) {
    using detail::fmt2;
    out << s.symbol << ',' << fmt2(s.u1) << ',' << fmt2(s.p2s) << ',' << fmt2(s.sharpe) << ','
        << detail::fmt_mio(s.tr) << ',' << detail::fmt_mio(s.gp) << ',' << fmt2(s.ratio) << ','
        << fmt2(s.p2s_forecast) << ',' << to_string(s.bucket) << ',' << flags_to_string(s.flags)
        << '\n';
}

inline ordered_json snapshot_json(const CompanySnapshot& s) {
    using detail::json_num;
    ordered_json j;
    j["symbol"] = s.symbol;
    j["u1"] = json_num(s.u1);
    j["p2s"] = json_num(s.p2s);
    j["sharpe"] = json_num(s.sharpe);
    j["tr_mio"] = json_num(s.tr / 1e6, 0);
    j["gp_mio"] = json_num(s.gp / 1e6, 0);
    j["ratio"] = json_num(s.ratio);
    j["p2s_fcst"] = json_num(s.p2s_forecast);
    j["bucket"] = std::string(to_string(s.bucket));
    j["flags"] = flags_to_string(s.flags);
    return j;
}

/// Top-n tables for every bucket, Mega first.
inline void write_screen(std::ostream& out, const ScreenRun& run, Date as_of, std::size_t top_n,
                         OutputFormat format) {
    std::vector<std::vector<CompanySnapshot>> tables;
    for (CapBucket b : kAllBuckets) tables.push_back(rank(run.snapshots, run.reports, b, top_n));

    switch (format) {
        case OutputFormat::Csv: {
            out << kScreenCsvHeader << '\n';
            for (const auto& table : tables)
                for (const auto& s : table) write_screen_csv_row(out, s);
            break;
        }
        case OutputFormat::Json: {
            using detail::json_num;
            ordered_json j;
            j["as_of"] = as_of.to_string();
            j["p2s_cutoff"] = {{"mode", run.cutoff_mode == CutoffMode::Pinned ? "pinned" : "computed"},
                               {"mean", json_num(run.population.mean)},
                               {"sigma", json_num(run.population.sigma)},
                               {"cutoff", json_num(run.cutoff)},
                               {"count", run.population.count}};
            j["tables"] = ordered_json::array();
            for (std::size_t i = 0; i < tables.size(); ++i) {
                ordered_json t;
                t["bucket"] = std::string(to_string(kAllBuckets[i]));
                t["rows"] = ordered_json::array();
                for (const auto& s : tables[i]) t["rows"].push_back(snapshot_json(s));
                j["tables"].push_back(std::move(t));
            }
            j["excluded"] = ordered_json::array();
            for (const auto& e : run.exclusions)
                j["excluded"].push_back({{"symbol", e.symbol}, {"reason", e.reason}});
            out << j.dump(2) << '\n';
            break;
        }
        case OutputFormat::Markdown: {
            using detail::fmt2;
            out << "# Top " << top_n << " U1 by market capitalization (as of " << as_of.to_string()
                << ")\n\n";
            out << "P2S cutoff " << fmt2(run.cutoff)
                << (run.cutoff_mode == CutoffMode::Pinned ? " (pinned)" : " (computed")
                << (run.cutoff_mode == CutoffMode::Pinned
                        ? std::string()
                        : ": mean " + fmt2(run.population.mean) + ", sigma " +
                              fmt2(run.population.sigma) + ", n = " +
                              std::to_string(run.population.count) + ")")
                << "\n";
            for (std::size_t i = 0; i < tables.size(); ++i) {
                out << "\n## " << detail::bucket_title(kAllBuckets[i]) << "\n\n";
                if (tables[i].empty()) {
                    out << "_no passing symbols_\n";
                    continue;
                }
                out << "| Symbol | U1 | P2S | Sharpe Ratio | TR (Mio) | GP (Mio) | Ratio | P2S Fcst | Flags |\n";
                out << "|---|---:|---:|---:|---:|---:|---:|---:|---|\n";
                for (const auto& s : tables[i])
                    out << "| " << s.symbol << " | " << fmt2(s.u1) << " | " << fmt2(s.p2s, "n/a")
                        << " | " << fmt2(s.sharpe) << " | " << detail::fmt_mio(s.tr) << " | "
                        << detail::fmt_mio(s.gp) << " | " << fmt2(s.ratio, "n/a") << " | "
                        << fmt2(s.p2s_forecast, "n/a") << " | " << flags_to_string(s.flags)
                        << " |\n";
            }
            if (!run.exclusions.empty()) {
                out << "\n## Excluded\n\n| Symbol | Reason |\n|---|---|\n";
                for (const auto& e : run.exclusions)
                    out << "| " << e.symbol << " | " << e.reason << " |\n";
            }
            break;
        }
    }
}

/// Every snapshot with its requirement outcomes; the scatter data behind
/// P2S-vs-U1, Sharpe-vs-U1 and P2S-vs-Sharpe plots.
inline void write_snapshots_csv(std::ostream& out, const ScreenRun& run) {
    using detail::fmt2;
    out << "symbol,u1,growth_tr,growth_gp,p2s,sharpe,tr_mio,gp_mio,ratio,p2s_fcst,bucket,"
           "analysts,trades,flags,c1_p2s,c2_analysts,c3_revenue,c4_profit,c5_sharpe,pass\n";
    for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
        const auto& s = run.snapshots[i];
        const auto& r = run.reports[i];
        out << s.symbol << ',' << fmt2(s.u1) << ',' << fmt2(s.growth_tr) << ','
            << fmt2(s.growth_gp) << ',' << fmt2(s.p2s) << ',' << fmt2(s.sharpe) << ','
            << detail::fmt_mio(s.tr) << ',' << detail::fmt_mio(s.gp) << ',' << fmt2(s.ratio)
            << ',' << fmt2(s.p2s_forecast) << ',' << to_string(s.bucket) << ','
            << s.analyst_count << ',' << s.trade_count << ',' << flags_to_string(s.flags) << ','
            << r.c1_p2s << ',' << r.c2_analysts << ',' << r.c3_revenue << ',' << r.c4_profit
            << ',' << r.c5_sharpe << ',' << r.pass << '\n';
    }
}

// ---------------------------------------------------------------------------
// growth
// ---------------------------------------------------------------------------

struct GrowthRow {
    std::string symbol;
    double growth_tr = 0.0;  // percent
    double growth_gp = 0.0;  // percent
    double u1 = 0.0;         // percent
    std::size_t points = 0;
    unsigned flags = 0;
};

inline void write_growth(std::ostream& out, const std::vector<GrowthRow>& rows, OutputFormat format) {
    using detail::fmt2;
    switch (format) {
        case OutputFormat::Csv:
            out << "symbol,tr_growth,gp_growth,u1,points,flags\n";
            for (const auto& r : rows)
                out << r.symbol << ',' << fmt2(r.growth_tr) << ',' << fmt2(r.growth_gp) << ','
                    << fmt2(r.u1) << ',' << r.points << ',' << flags_to_string(r.flags) << '\n';
            break;
        case OutputFormat::Json: {
            ordered_json j = ordered_json::array();
            for (const auto& r : rows)
                j.push_back({{"symbol", r.symbol},
                             {"tr_growth", detail::json_num(r.growth_tr)},
                             {"gp_growth", detail::json_num(r.growth_gp)},
                             {"u1", detail::json_num(r.u1)},
                             {"points", r.points},
                             {"flags", flags_to_string(r.flags)}});
            out << j.dump(2) << '\n';
            break;
        }
        case OutputFormat::Markdown:
            out << "| Symbol | TR Growth % | GP Growth % | U1 % | Points | Flags |\n";
            out << "|---|---:|---:|---:|---:|---|\n";
            for (const auto& r : rows)
                out << "| " << r.symbol << " | " << fmt2(r.growth_tr) << " | " << fmt2(r.growth_gp)
                    << " | " << fmt2(r.u1) << " | " << r.points << " | "
                    << flags_to_string(r.flags) << " |\n";
            break;
    }
}

// ---------------------------------------------------------------------------
// hist
// ---------------------------------------------------------------------------

/// Bins (overflow as a final row with high = inf), a blank line, then the
/// `mean,sigma,cutoff,count` stats block.
inline void write_histogram(std::ostream& out, const Histogram& h, const PopulationStats& stats,
                            OutputFormat format) {
    using detail::fmt2;
    const double overflow_low = h.bins.empty() ? 0.0 : h.bins.back().high;
    switch (format) {
        case OutputFormat::Csv:
            out << "bin_low,bin_high,count\n";
            for (const auto& b : h.bins)
                out << format_exact(b.low) << ',' << format_exact(b.high) << ',' << b.count << '\n';
            out << format_exact(overflow_low) << ",inf," << h.overflow << '\n';
            out << "\nmean,sigma,cutoff,count\n";
            out << fmt2(stats.mean) << ',' << fmt2(stats.sigma) << ',' << fmt2(stats.cutoff) << ','
                << stats.count << '\n';
            break;
        case OutputFormat::Json: {
            ordered_json j;
            j["bins"] = ordered_json::array();
            for (const auto& b : h.bins)
                j["bins"].push_back({{"low", b.low}, {"high", b.high}, {"count", b.count}});
            j["overflow"] = h.overflow;
            j["rejected"] = h.rejected.size();
            j["stats"] = {{"mean", detail::json_num(stats.mean)},
                          {"sigma", detail::json_num(stats.sigma)},
                          {"cutoff", detail::json_num(stats.cutoff)},
                          {"count", stats.count}};
            out << j.dump(2) << '\n';
            break;
        }
        case OutputFormat::Markdown:
            out << "| Bin | Count |\n|---|---:|\n";
            for (const auto& b : h.bins)
                out << "| [" << format_exact(b.low) << ", " << format_exact(b.high) << ") | "
                    << b.count << " |\n";
            out << "| >= " << format_exact(overflow_low) << " | " << h.overflow << " |\n";
            out << "\nmean " << fmt2(stats.mean) << ", sigma " << fmt2(stats.sigma)
                << ", cutoff " << fmt2(stats.cutoff) << ", n = " << stats.count << '\n';
            break;
    }
}

// ---------------------------------------------------------------------------
// backtest
// ---------------------------------------------------------------------------

struct BacktestRow {
    std::string symbol;
    double sharpe = 0.0;
    double buy_hold_sharpe = 0.0;
    int trade_count = 0;
    std::size_t bars = 0;
};

inline void write_backtest(std::ostream& out, const std::vector<BacktestRow>& rows,
                           OutputFormat format) {
    using detail::fmt2;
    switch (format) {
        case OutputFormat::Csv:
            out << "symbol,sharpe,buy_hold_sharpe,trade_count,bars\n";
            for (const auto& r : rows)
                out << r.symbol << ',' << fmt2(r.sharpe) << ',' << fmt2(r.buy_hold_sharpe) << ','
                    << r.trade_count << ',' << r.bars << '\n';
            break;
        case OutputFormat::Json: {
            ordered_json j = ordered_json::array();
            for (const auto& r : rows)
                j.push_back({{"symbol", r.symbol},
                             {"sharpe", detail::json_num(r.sharpe)},
                             {"buy_hold_sharpe", detail::json_num(r.buy_hold_sharpe)},
                             {"trade_count", r.trade_count},
                             {"bars", r.bars}});
            out << j.dump(2) << '\n';
            break;
        }
        case OutputFormat::Markdown:
            out << "| Symbol | Sharpe | Buy & Hold Sharpe | Trades | Bars |\n";
            out << "|---|---:|---:|---:|---:|\n";
            for (const auto& r : rows)
                out << "| " << r.symbol << " | " << fmt2(r.sharpe) << " | "
                    << fmt2(r.buy_hold_sharpe) << " | " << r.trade_count << " | " << r.bars
                    << " |\n";
            break;
    }
}

}  // namespace growthscreen
