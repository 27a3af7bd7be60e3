// growthscreen/screen.hpp
//
// Per-symbol snapshots, the five screening requirements, market-cap
// bucketing and U1 ranking.
//
// Requirements evaluated against a snapshot:
//   c1  P2S < cutoff
//   c2  analyst_count >= 1
//   c3  TR > 0
//   c4  GP >= 0, or the gross loss is at most 25% of TR (TR/GP <= -4);
//       strict mode requires TR/GP < -4
//   c5  trend-following Sharpe > 0
#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "growthscreen/backtest.hpp"
#include "growthscreen/core.hpp"
#include "growthscreen/ingest.hpp"
#include "growthscreen/metrics.hpp"
#include "growthscreen/regress.hpp"

namespace growthscreen {

enum class CapBucket { Mega, Big, Mid, Small, Micro, Nano };

inline constexpr std::array<CapBucket, 6> kAllBuckets = {
    CapBucket::Mega, CapBucket::Big, CapBucket::Mid,
    CapBucket::Small, CapBucket::Micro, CapBucket::Nano};

inline std::string_view to_string(CapBucket b) {
    switch (b) {
        case CapBucket::Mega: return "Mega";
        case CapBucket::Big: return "Big";
        case CapBucket::Mid: return "Mid";
        case CapBucket::Small: return "Small";
        case CapBucket::Micro: return "Micro";
        case CapBucket::Nano: return "Nano";
    }
    return "?";
}

/// Inclusive lower bounds of Mega, Big, Mid, Small and Micro; everything
/// below `micro` is Nano.
struct BucketThresholds {
    double mega = 200e9;
    double big = 10e9;
    double mid = 2e9;
    double small = 300e6;
    double micro = 50e6;

    void validate() const {
        if (!(mega > big && big > mid && mid > small && small > micro && micro > 0))
            throw std::invalid_argument("bucket thresholds must be positive and strictly decreasing");
    }
};

inline CapBucket cap_bucket(double market_cap, const BucketThresholds& t = {}) {
    if (market_cap >= t.mega) return CapBucket::Mega;
    if (market_cap >= t.big) return CapBucket::Big;
    if (market_cap >= t.mid) return CapBucket::Mid;
    if (market_cap >= t.small) return CapBucket::Small;
    if (market_cap >= t.micro) return CapBucket::Micro;
    return CapBucket::Nano;
}

// ---------------------------------------------------------------------------
// Snapshot
// ---------------------------------------------------------------------------

enum SnapshotFlag : unsigned {
    kFlagDegenerateFit = 1u << 0,      // a fitted baseline was <= 0
    kFlagUndefinedP2s = 1u << 1,       // TR <= 0
    kFlagUndefinedForecast = 1u << 2,  // P2S undefined or U1 <= -100
};

inline std::string flags_to_string(unsigned flags) {
    std::string out;
    auto add = [&](unsigned bit, const char* name) {
        if (!(flags & bit)) return;
        if (!out.empty()) out += '|';
        out += name;
    };
    add(kFlagDegenerateFit, "degenerate-fit");
    add(kFlagUndefinedP2s, "undefined-p2s");
    add(kFlagUndefinedForecast, "undefined-forecast");
    return out;
}

struct CompanySnapshot {
    std::string symbol;
    double u1 = 0.0;         // percent
    double growth_tr = 0.0;  // percent
    double growth_gp = 0.0;  // percent
    std::optional<double> p2s;
    double sharpe = 0.0;
    double tr = 0.0;  // latest in-window TTM revenue, USD
    double gp = 0.0;  // latest in-window TTM gross profit, USD
    std::optional<double> ratio;  // TR / GP
    std::optional<double> p2s_forecast;
    std::int64_t analyst_count = 0;
    double market_cap = 0.0;
    CapBucket bucket = CapBucket::Nano;
    unsigned flags = 0;
    int trade_count = 0;
    std::size_t fit_points = 0;
};

struct ConstraintReport {
    bool c1_p2s = false;
    bool c2_analysts = false;
    bool c3_revenue = false;
    bool c4_profit = false;
    bool c5_sharpe = false;
    bool pass = false;
};

struct ConstraintOptions {
    bool strict_c4 = false;
};

/// Gross-loss test. Written multiplicatively (tr >= -4 gp for gp < 0) so the
/// boundary is exact; equivalent to tr / gp <= -4.
inline bool gross_profit_ok(double tr, double gp, bool strict = false) {
    if (gp >= 0.0) return true;
    return strict ? tr > -4.0 * gp : tr >= -4.0 * gp;
}

inline ConstraintReport evaluate_constraints(const CompanySnapshot& s, double p2s_cutoff,
                                             ConstraintOptions options = {}) {
    ConstraintReport r;
    r.c1_p2s = s.p2s.has_value() && *s.p2s < p2s_cutoff;
    r.c2_analysts = s.analyst_count >= 1;
    r.c3_revenue = s.tr > 0.0;
    r.c4_profit = gross_profit_ok(s.tr, s.gp, options.strict_c4);
    r.c5_sharpe = s.sharpe > 0.0;
    r.pass = r.c1_p2s && r.c2_analysts && r.c3_revenue && r.c4_profit && r.c5_sharpe;
    return r;
}

struct ScreenConfig {
    int window_days = kDefaultWindowDays;
    AtrParams atr;
    BucketThresholds thresholds;
    double periods_per_year = 252.0;
    /// Evaluate growth at this epoch time instead of the last in-window date.
    std::optional<double> eval_time;
    ConstraintOptions constraints;

    void validate() const {
        if (window_days < 1) throw std::invalid_argument("window_days must be >= 1");
        atr.validate();
        thresholds.validate();
        if (!(periods_per_year > 0)) throw std::invalid_argument("periods_per_year must be positive");
    }
};

/// A symbol left out of screening, and why.
struct Exclusion {
    std::string symbol;
    std::string reason;

    friend bool operator==(const Exclusion&, const Exclusion&) = default;
};

using SnapshotOutcome = std::variant<CompanySnapshot, Exclusion>;

/// Growth of one fitted series, in percent, at the evaluation time.
struct SeriesGrowth {
    double percent = 0.0;
    bool degenerate = false;
};

/// Fits revenue and gross profit of an (already windowed) series.
/// Throws InsufficientData/SingularFit/UndefinedValue from the fitting layer.
inline std::pair<SeriesGrowth, SeriesGrowth> fit_growths(const FundamentalSeries& windowed,
                                                         double t_eval) {
    std::vector<TimedValue> tr, gp;
    tr.reserve(windowed.points.size());
    gp.reserve(windowed.points.size());
    for (const auto& p : windowed.points) {
        tr.push_back({p.date.epoch_seconds(), p.total_revenue});
        gp.push_back({p.date.epoch_seconds(), p.gross_profit});
    }
    const GrowthEstimate g_tr = annual_growth(fit_line_stable(tr), t_eval);
    const GrowthEstimate g_gp = annual_growth(fit_line_stable(gp), t_eval);
    return {{percent_from_fraction(g_tr.growth), g_tr.degenerate},
            {percent_from_fraction(g_gp.growth), g_gp.degenerate}};
}

inline SnapshotOutcome build_snapshot(const FundamentalSeries& fundamentals,
                                      std::span<const PriceBar> bars, const CompanyMeta& meta,
                                      Date as_of, const ScreenConfig& config) {
    const std::string& symbol = fundamentals.symbol;
    const FundamentalSeries in_window = window(fundamentals, as_of, config.window_days);
    if (in_window.points.size() < 2) return Exclusion{symbol, "insufficient-data"};

    const double t_eval = config.eval_time.value_or(in_window.points.back().date.epoch_seconds());
    std::pair<SeriesGrowth, SeriesGrowth> growths;
    try {
        growths = fit_growths(in_window, t_eval);
    } catch (const UndefinedValue&) {
        return Exclusion{symbol, "zero-baseline"};
    }

    const std::vector<PriceBar> bar_window = window(bars, as_of, config.window_days);
    if (bar_window.empty()) return Exclusion{symbol, "no-price-history"};
    BacktestResult bt;
    try {
        bt = run_trend_backtest(bar_window, config.atr, config.periods_per_year);
    } catch (const InsufficientData&) {
        return Exclusion{symbol, "insufficient-price-history"};
    }

    CompanySnapshot s;
    s.symbol = symbol;
    const U1Score score = u1(growths.first.percent, growths.second.percent,
                             growths.first.degenerate || growths.second.degenerate);
    s.u1 = score.value;
    s.growth_tr = score.growth_tr;
    s.growth_gp = score.growth_gp;
    if (score.degenerate) s.flags |= kFlagDegenerateFit;

    const FundamentalPoint& latest = in_window.points.back();
    s.tr = latest.total_revenue;
    s.gp = latest.gross_profit;
    s.ratio = tr_gp_ratio(s.tr, s.gp);
    s.market_cap = meta.market_cap;
    s.analyst_count = meta.analyst_count;
    s.bucket = cap_bucket(meta.market_cap, config.thresholds);
    s.sharpe = bt.sharpe;
    s.trade_count = bt.trade_count;
    s.fit_points = in_window.points.size();

    if (s.tr > 0.0) {
        s.p2s = p2s(s.market_cap, s.tr);
        if (s.u1 > -100.0) s.p2s_forecast = p2s_forecast(*s.p2s, s.u1);
        else s.flags |= kFlagUndefinedForecast;
    } else {
        s.flags |= kFlagUndefinedP2s | kFlagUndefinedForecast;
    }
    return s;
}

/// Passing snapshots of one bucket, U1 descending, ties by symbol, first n.
inline std::vector<CompanySnapshot> rank(std::span<const CompanySnapshot> snapshots,
                                         std::span<const ConstraintReport> reports,
                                         CapBucket bucket, std::size_t n = 10) {
    if (reports.size() != snapshots.size())
        throw std::invalid_argument("reports must align with snapshots");
    if (n < 1) throw std::invalid_argument("rank size must be >= 1");
    std::vector<CompanySnapshot> out;
    for (std::size_t i = 0; i < snapshots.size(); ++i)
        if (reports[i].pass && snapshots[i].bucket == bucket) out.push_back(snapshots[i]);
    std::sort(out.begin(), out.end(), [](const CompanySnapshot& a, const CompanySnapshot& b) {
        if (a.u1 != b.u1) return a.u1 > b.u1;
        return a.symbol < b.symbol;
    });
    if (out.size() > n) out.resize(n);
    return out;
}

// ---------------------------------------------------------------------------
// Whole-universe run
// ---------------------------------------------------------------------------

enum class CutoffMode { Computed, Pinned };

struct ScreenRun {
    std::vector<CompanySnapshot> snapshots;  // symbol ascending
    std::vector<ConstraintReport> reports;   // aligned with snapshots
    std::vector<Exclusion> exclusions;       // symbol ascending
    PopulationStats population;              // source of the cutoff
    double cutoff = kReferenceP2sCutoff;
    CutoffMode cutoff_mode = CutoffMode::Computed;
};

/// P2S population statistics of the snapshots (defined P2S only).
inline PopulationStats snapshot_population(std::span<const CompanySnapshot> snapshots,
                                           PopulationFilter filter = {}) {
    std::vector<double> values, caps, revenues;
    for (const auto& s : snapshots) {
        if (!s.p2s) continue;
        values.push_back(*s.p2s);
        caps.push_back(s.market_cap);
        revenues.push_back(s.tr);
    }
    return population_stats(values, caps, revenues, filter);
}

inline ScreenRun screen_universe(const FundamentalsBySymbol& fundamentals,
                                 const PricesBySymbol& prices, const MetaBySymbol& meta,
                                 Date as_of, const ScreenConfig& config,
                                 CutoffMode cutoff_mode = CutoffMode::Computed,
                                 PopulationFilter population_filter = {}) {
    config.validate();
    std::vector<std::string> symbols;
    for (const auto& [sym, _] : fundamentals) symbols.push_back(sym);
    for (const auto& [sym, _] : prices) symbols.push_back(sym);
    for (const auto& [sym, _] : meta) symbols.push_back(sym);
    std::sort(symbols.begin(), symbols.end());
    symbols.erase(std::unique(symbols.begin(), symbols.end()), symbols.end());

    ScreenRun run;
    run.cutoff_mode = cutoff_mode;
    static const std::vector<PriceBar> no_bars;
    for (const auto& symbol : symbols) {
        auto f = fundamentals.find(symbol);
        if (f == fundamentals.end()) {
            run.exclusions.push_back({symbol, "no-fundamentals"});
            continue;
        }
        auto m = meta.find(symbol);
        if (m == meta.end()) {
            run.exclusions.push_back({symbol, "no-meta"});
            continue;
        }
        auto p = prices.find(symbol);
        const std::vector<PriceBar>& bars = p == prices.end() ? no_bars : p->second;
        SnapshotOutcome outcome = build_snapshot(f->second, bars, m->second, as_of, config);
        if (auto* ex = std::get_if<Exclusion>(&outcome)) run.exclusions.push_back(std::move(*ex));
        else run.snapshots.push_back(std::move(std::get<CompanySnapshot>(outcome)));
    }

    if (cutoff_mode == CutoffMode::Pinned) {
        run.population = stats_from_moments(kReferenceP2sMean, kReferenceP2sSigma);
        run.cutoff = kReferenceP2sCutoff;
    } else {
        run.population = snapshot_population(run.snapshots, population_filter);
        run.cutoff = run.population.cutoff;
    }
    run.reports.reserve(run.snapshots.size());
    for (const auto& s : run.snapshots)
        run.reports.push_back(evaluate_constraints(s, run.cutoff, config.constraints));
    return run;
}

}  // namespace growthscreen
