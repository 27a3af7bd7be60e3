// growthscreen/cli.hpp
//
// The `growthscreen` command line: growth, screen, hist, backtest and ttm
// subcommands. run() is stream-based so it can be driven in-process by tests.
//
// Exit status: 0 success, 1 data error (unreadable or malformed input),
// 2 usage error (bad flags, bad config file).
#pragma once

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "growthscreen/backtest.hpp"
#include "growthscreen/config.hpp"
#include "growthscreen/core.hpp"
#include "growthscreen/ingest.hpp"
#include "growthscreen/metrics.hpp"
#include "growthscreen/report.hpp"
#include "growthscreen/screen.hpp"

namespace growthscreen::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

/// Input that cannot be read or parsed; reported with the file name.
class DataError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

namespace detail {

template <typename Parse>
auto load_file(const std::string& path, const char* what, Parse parse) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(std::string("cannot open ") + what + " file '" + path + "'");
    try {
        return parse(in);
    } catch (const ParseError& e) {
        throw DataError(path + ": " + e.what());
    } catch (const SchemaError& e) {
        throw DataError(path + ": " + e.what());
    }
}

inline Date parse_date_arg(const std::string& text, const char* flag) {
    Date d;
    if (!Date::try_parse(text, d))
        throw UsageError(std::string(flag) + ": invalid date '" + text + "' (expected YYYY-MM-DD)");
    return d;
}

inline std::optional<Date> latest_date(const FundamentalsBySymbol& data) {
    std::optional<Date> best;
    for (const auto& [_, s] : data)
        if (!s.points.empty() && (!best || s.points.back().date > *best)) best = s.points.back().date;
    return best;
}

inline std::optional<Date> latest_date(const PricesBySymbol& data) {
    std::optional<Date> best;
    for (const auto& [_, bars] : data)
        if (!bars.empty() && (!best || bars.back().date > *best)) best = bars.back().date;
    return best;
}

/// Converts quarterly series to TTM in place; short series are dropped and
/// reported through `excluded`.
inline void apply_ttm(FundamentalsBySymbol& data, std::vector<Exclusion>& excluded) {
    for (auto it = data.begin(); it != data.end();) {
        try {
            it->second = compute_ttm(it->second);
            ++it;
        } catch (const InsufficientData&) {
            excluded.push_back({it->first, "insufficient-data"});
            it = data.erase(it);
        }
    }
}

/// Latest point dated on or before `as_of`.
inline const FundamentalPoint* latest_at(const FundamentalSeries& s, Date as_of) {
    const FundamentalPoint* found = nullptr;
    for (const auto& p : s.points) {
        if (p.date > as_of) break;
        found = &p;
    }
    return found;
}

/// Collects "--flag given on the command line" overrides of RunConfig.
class Overrides {
public:
    template <typename T>
    CLI::Option* add(CLI::App* app, const std::string& name, T RunConfig::*field,
                     const std::string& help) {
        auto* opt = app->add_option(name, flags_.*field, help);
        overlays_.push_back([opt, field, this](RunConfig& cfg) {
            if (opt->count() > 0) cfg.*field = flags_.*field;
        });
        return opt;
    }

    CLI::Option* add_flag(CLI::App* app, const std::string& name, bool RunConfig::*field,
                          const std::string& help) {
        auto* opt = app->add_flag(name, flags_.*field, help);
        overlays_.push_back([opt, field, this](RunConfig& cfg) {
            if (opt->count() > 0) cfg.*field = flags_.*field;
        });
        return opt;
    }

    /// String-valued option converted when applied.
    CLI::Option* add_text(CLI::App* app, const std::string& name, std::string default_text,
                          const std::string& help,
                          std::function<void(RunConfig&, const std::string&)> apply) {
        auto text = std::make_shared<std::string>(std::move(default_text));
        texts_.push_back(text);
        auto* opt = app->add_option(name, *text, help);
        overlays_.push_back([opt, text, apply](RunConfig& cfg) {
            if (opt->count() > 0) apply(cfg, *text);
        });
        return opt;
    }

    void apply(RunConfig& cfg) const {
        for (const auto& f : overlays_) f(cfg);
    }

private:
    RunConfig flags_;
    std::vector<std::function<void(RunConfig&)>> overlays_;
    std::vector<std::shared_ptr<std::string>> texts_;
};

inline std::string format_name(OutputFormat f) {
    switch (f) {
        case OutputFormat::Csv: return "csv";
        case OutputFormat::Json: return "json";
        case OutputFormat::Markdown: return "markdown";
    }
    return "csv";
}

inline std::string thresholds_text(const BucketThresholds& t) {
    return format_exact(t.mega) + "," + format_exact(t.big) + "," + format_exact(t.mid) + "," +
           format_exact(t.small) + "," + format_exact(t.micro);
}

}  // namespace detail

/// Entry point. `argv[0]` is the program name.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    const RunConfig defaults;
    const double wall_clock = now_epoch_seconds();

    CLI::App app{"Growth-average (U1) valuation and screening toolkit", "growthscreen"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    std::string config_path;
    std::string output_path;
    detail::Overrides overrides;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path,
                        "Config file of 'key = value' lines; command-line flags take precedence");
        sub->add_option("-o,--output", output_path, "Write the report here instead of stdout");
        overrides.add_text(sub, "--format", detail::format_name(defaults.output_format),
                           "Output format: csv, json or markdown",
                           [](RunConfig& c, const std::string& v) {
                               c.output_format = parse_output_format(v);
                           });
    };
    auto add_window = [&](CLI::App* sub) {
        overrides.add(sub, "--window-days", &RunConfig::window_days,
                      "Look-back window in calendar days, inclusive of as-of minus days");
    };
    auto add_eval_at = [&](CLI::App* sub) {
        overrides.add_text(sub, "--eval-at", "last-data-date",
                           "Growth evaluation time: last-data-date (last in-window fundamentals "
                           "date) or wall-clock",
                           [](RunConfig& c, const std::string& v) { c.eval_at = parse_eval_at(v); });
    };
    auto add_quarterly = [&](CLI::App* sub) {
        overrides.add_flag(sub, "--quarterly", &RunConfig::quarterly,
                           "Input amounts are single quarters; convert to trailing-twelve-month "
                           "sums first");
    };
    auto add_atr = [&](CLI::App* sub) {
        overrides.add(sub, "--atr-period", &RunConfig::atr_period, "Wilder ATR smoothing period");
        overrides.add(sub, "--atr-multiplier", &RunConfig::atr_multiplier,
                      "Trailing-stop distance in ATR multiples");
    };
    auto add_floors = [&](CLI::App* sub) {
        overrides.add(sub, "--cap-floor", &RunConfig::cap_floor,
                      "Minimum market cap (USD) for the P2S population");
        overrides.add(sub, "--revenue-floor", &RunConfig::revenue_floor,
                      "Minimum TTM revenue (USD) for the P2S population");
    };

    // growth
    std::string growth_fundamentals, growth_as_of;
    auto* growth = app.add_subcommand("growth", "Per-symbol TR and GP growth and U1");
    growth->add_option("--fundamentals", growth_fundamentals, "Fundamentals CSV")->required();
    growth->add_option("--as-of", growth_as_of,
                       "Window end date YYYY-MM-DD (default: latest date in the file)");
    add_window(growth);
    add_eval_at(growth);
    add_quarterly(growth);
    add_common(growth);

    // screen
    std::string screen_fundamentals, screen_prices, screen_meta, screen_as_of, snapshots_out;
    auto* screen = app.add_subcommand("screen", "Full pipeline: ranked U1 tables per market-cap bucket");
    screen->add_option("--fundamentals", screen_fundamentals, "Fundamentals CSV")->required();
    screen->add_option("--prices", screen_prices, "Prices CSV")->required();
    screen->add_option("--meta", screen_meta, "Meta CSV")->required();
    screen->add_option("--as-of", screen_as_of,
                       "Screening date YYYY-MM-DD (default: latest fundamentals date)");
    add_window(screen);
    add_atr(screen);
    overrides.add_text(screen, "--p2s-cutoff", "computed",
                       "P2S cutoff: computed (mean + 2 sigma of the loaded universe) or pinned "
                       "(27.73)",
                       [](RunConfig& c, const std::string& v) { c.cutoff_mode = parse_cutoff_mode(v); });
    overrides.add(screen, "--top-n", &RunConfig::top_n, "Rows per bucket table");
    add_eval_at(screen);
    overrides.add_text(screen, "--bucket-thresholds", detail::thresholds_text(defaults.thresholds),
                       "Lower bounds (USD) of Mega,Big,Mid,Small,Micro; below Micro is Nano",
                       [](RunConfig& c, const std::string& v) { c.thresholds = parse_thresholds(v); });
    overrides.add_flag(screen, "--strict-c4", &RunConfig::strict_c4,
                       "Gross-loss requirement uses TR/GP < -4 instead of <= -4");
    add_quarterly(screen);
    add_floors(screen);
    screen->add_option("--snapshots-out", snapshots_out,
                       "Also write every snapshot with its requirement outcomes as CSV");
    add_common(screen);

    // hist
    std::string hist_fundamentals, hist_meta, hist_as_of;
    auto* hist = app.add_subcommand("hist", "P2S histogram and population statistics");
    hist->add_option("--fundamentals", hist_fundamentals, "Fundamentals CSV")->required();
    hist->add_option("--meta", hist_meta, "Meta CSV")->required();
    hist->add_option("--as-of", hist_as_of,
                     "Revenue date YYYY-MM-DD; latest point on or before it is used "
                     "(default: latest fundamentals date)");
    overrides.add(hist, "--bin-width", &RunConfig::bin_width, "Histogram bin width");
    overrides.add(hist, "--range-max", &RunConfig::range_max,
                  "Values at or above this land in the overflow row");
    add_floors(hist);
    add_quarterly(hist);
    add_common(hist);

    // backtest
    std::string bt_prices, bt_as_of, positions_out;
    auto* backtest = app.add_subcommand("backtest", "Per-symbol trend-following Sharpe ratio");
    backtest->add_option("--prices", bt_prices, "Prices CSV")->required();
    backtest->add_option("--as-of", bt_as_of, "Window end date YYYY-MM-DD (default: latest bar date)");
    add_window(backtest);
    add_atr(backtest);
    backtest->add_option("--positions-out", positions_out,
                         "Also write the daily position series (symbol,date,position) as CSV");
    add_common(backtest);

    // ttm
    std::string ttm_input;
    bool skip_short = false;
    auto* ttm = app.add_subcommand("ttm", "Convert quarterly fundamentals to trailing-twelve-month sums");
    ttm->add_option("--input", ttm_input, "Quarterly fundamentals CSV")->required();
    ttm->add_flag("--skip-short", skip_short, "Drop symbols with fewer than 4 quarters instead of failing");
    ttm->add_option("-o,--output", output_path, "Write here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        RunConfig cfg = defaults;
        if (!config_path.empty()) {
            std::ifstream cin(config_path);
            if (!cin) throw UsageError("cannot open config file '" + config_path + "'");
            cfg = load_config(cin, cfg);
        }
        overrides.apply(cfg);
        try {
            cfg.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }

        std::ostringstream buffer;
        std::ostream& report = output_path.empty() ? out : static_cast<std::ostream&>(buffer);
        auto note_exclusions = [&](const std::vector<Exclusion>& ex) {
            for (const auto& e : ex) err << "excluded " << e.symbol << ": " << e.reason << '\n';
        };

        if (growth->parsed()) {
            auto data = detail::load_file(growth_fundamentals, "fundamentals",
                                          [](std::istream& in) { return parse_fundamentals(in); });
            std::vector<Exclusion> excluded;
            if (cfg.quarterly) detail::apply_ttm(data, excluded);
            std::optional<Date> as_of = growth_as_of.empty()
                                            ? detail::latest_date(data)
                                            : detail::parse_date_arg(growth_as_of, "--as-of");
            if (!as_of) throw DataError("no fundamentals loaded");
            std::vector<GrowthRow> rows;
            for (const auto& [symbol, series] : data) {
                const FundamentalSeries w = window(series, *as_of, cfg.window_days);
                if (w.points.size() < 2) {
                    excluded.push_back({symbol, "insufficient-data"});
                    continue;
                }
                const double t_eval = cfg.eval_at == EvalAt::WallClock
                                          ? wall_clock
                                          : w.points.back().date.epoch_seconds();
                try {
                    auto [tr, gp] = fit_growths(w, t_eval);
                    const U1Score score = u1(tr.percent, gp.percent, tr.degenerate || gp.degenerate);
                    rows.push_back({symbol, score.growth_tr, score.growth_gp, score.value,
                                    w.points.size(), score.degenerate ? kFlagDegenerateFit : 0u});
                } catch (const UndefinedValue&) {
                    excluded.push_back({symbol, "zero-baseline"});
                }
            }
            std::sort(excluded.begin(), excluded.end(),
                      [](const Exclusion& a, const Exclusion& b) { return a.symbol < b.symbol; });
            note_exclusions(excluded);
            write_growth(report, rows, cfg.output_format);
        } else if (screen->parsed()) {
            auto fundamentals = detail::load_file(screen_fundamentals, "fundamentals",
                                                  [](std::istream& in) { return parse_fundamentals(in); });
            auto prices = detail::load_file(screen_prices, "prices",
                                            [](std::istream& in) { return parse_prices(in); });
            auto meta = detail::load_file(screen_meta, "meta",
                                          [](std::istream& in) { return parse_meta(in); });
            std::vector<Exclusion> ttm_excluded;
            if (cfg.quarterly) detail::apply_ttm(fundamentals, ttm_excluded);
            std::optional<Date> as_of = screen_as_of.empty()
                                            ? detail::latest_date(fundamentals)
                                            : detail::parse_date_arg(screen_as_of, "--as-of");
            if (!as_of) throw DataError("no fundamentals to screen");
            ScreenRun result;
            try {
                result = screen_universe(fundamentals, prices, meta, *as_of,
                                         cfg.screen_config(wall_clock), cfg.cutoff_mode,
                                         {cfg.cap_floor, cfg.revenue_floor});
            } catch (const InsufficientData& e) {
                throw DataError(std::string("cannot compute the P2S cutoff: ") + e.what() +
                                " (use --p2s-cutoff pinned or lower --cap-floor/--revenue-floor)");
            }
            for (auto& e : ttm_excluded) {
                auto pos = std::find_if(result.exclusions.begin(), result.exclusions.end(),
                                        [&](const Exclusion& x) { return x.symbol == e.symbol; });
                if (pos != result.exclusions.end()) pos->reason = e.reason;
            }
            note_exclusions(result.exclusions);
            write_screen(report, result, *as_of, static_cast<std::size_t>(cfg.top_n),
                         cfg.output_format);
            if (!snapshots_out.empty()) {
                std::ofstream f(snapshots_out, std::ios::binary);
                if (!f) throw DataError("cannot write '" + snapshots_out + "'");
                write_snapshots_csv(f, result);
            }
        } else if (hist->parsed()) {
            auto fundamentals = detail::load_file(hist_fundamentals, "fundamentals",
                                                  [](std::istream& in) { return parse_fundamentals(in); });
            auto meta = detail::load_file(hist_meta, "meta",
                                          [](std::istream& in) { return parse_meta(in); });
            std::vector<Exclusion> excluded;
            if (cfg.quarterly) detail::apply_ttm(fundamentals, excluded);
            std::optional<Date> as_of = hist_as_of.empty()
                                            ? detail::latest_date(fundamentals)
                                            : detail::parse_date_arg(hist_as_of, "--as-of");
            if (!as_of) throw DataError("no fundamentals loaded");
            std::vector<double> values, caps, revenues;
            for (const auto& [symbol, m] : meta) {
                auto f = fundamentals.find(symbol);
                const FundamentalPoint* latest =
                    f == fundamentals.end() ? nullptr : detail::latest_at(f->second, *as_of);
                if (!latest) {
                    excluded.push_back({symbol, "no-fundamentals"});
                    continue;
                }
                if (!(latest->total_revenue > 0)) {
                    excluded.push_back({symbol, "undefined-p2s"});
                    continue;
                }
                values.push_back(p2s(m.market_cap, latest->total_revenue));
                caps.push_back(m.market_cap);
                revenues.push_back(latest->total_revenue);
            }
            std::sort(excluded.begin(), excluded.end(),
                      [](const Exclusion& a, const Exclusion& b) { return a.symbol < b.symbol; });
            note_exclusions(excluded);
            const PopulationFilter filter{cfg.cap_floor, cfg.revenue_floor};
            std::vector<double> kept;
            for (std::size_t i = 0; i < values.size(); ++i)
                if (caps[i] >= filter.cap_floor && revenues[i] >= filter.revenue_floor)
                    kept.push_back(values[i]);
            PopulationStats stats;
            try {
                stats = population_stats(values, caps, revenues, filter);
            } catch (const InsufficientData& e) {
                throw DataError(std::string(e.what()) + " (lower --cap-floor/--revenue-floor)");
            }
            write_histogram(report, histogram(kept, cfg.bin_width, cfg.range_max), stats,
                            cfg.output_format);
        } else if (backtest->parsed()) {
            auto prices = detail::load_file(bt_prices, "prices",
                                            [](std::istream& in) { return parse_prices(in); });
            std::optional<Date> as_of = bt_as_of.empty() ? detail::latest_date(prices)
                                                         : detail::parse_date_arg(bt_as_of, "--as-of");
            if (!as_of) throw DataError("no prices loaded");
            const AtrParams params{cfg.atr_period, cfg.atr_multiplier};
            std::vector<BacktestRow> rows;
            std::ostringstream positions;
            positions << "symbol,date,position\n";
            for (const auto& [symbol, bars] : prices) {
                const std::vector<PriceBar> w = window(bars, *as_of, cfg.window_days);
                try {
                    const BacktestResult r = run_trend_backtest(w, params);
                    rows.push_back({symbol, r.sharpe, buy_hold_sharpe(w), r.trade_count, w.size()});
                    for (std::size_t i = 0; i < w.size(); ++i)
                        positions << symbol << ',' << w[i].date.to_string() << ','
                                  << (r.positions[i] == Position::Long ? 1 : 0) << '\n';
                } catch (const InsufficientData&) {
                    err << "excluded " << symbol << ": insufficient-price-history\n";
                }
            }
            write_backtest(report, rows, cfg.output_format);
            if (!positions_out.empty()) {
                std::ofstream f(positions_out, std::ios::binary);
                if (!f) throw DataError("cannot write '" + positions_out + "'");
                f << positions.str();
            }
        } else if (ttm->parsed()) {
            auto data = detail::load_file(ttm_input, "fundamentals",
                                          [](std::istream& in) { return parse_fundamentals(in); });
            FundamentalsBySymbol converted;
            for (const auto& [symbol, series] : data) {
                try {
                    converted.emplace(symbol, compute_ttm(series));
                } catch (const InsufficientData& e) {
                    if (!skip_short) throw DataError(ttm_input + ": symbol " + symbol + ": " + e.what());
                    err << "excluded " << symbol << ": insufficient-data\n";
                }
            }
            write_fundamentals(report, converted);
        }

        if (!output_path.empty()) {
            std::ofstream f(output_path, std::ios::binary);
            if (!f) throw DataError("cannot write '" + output_path + "'");
            f << buffer.str();
        }
        return kExitOk;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace growthscreen::cli
