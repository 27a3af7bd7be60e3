// growthscreen/backtest.hpp
//
// Long/flat trend follower driven by Wilder's average true range, and the
// Sharpe ratio of its daily returns.
//
// Rules (period p, multiplier k):
//   true range  TR_i  = max(high_i - low_i, |high_i - close_{i-1}|, |low_i - close_{i-1}|)
//   ATR_p            = mean(TR_1 .. TR_p)
//   ATR_i            = (ATR_{i-1} * (p - 1) + TR_i) / p          for i > p
//
//   flat: track the lowest close since the last exit; enter long when
//         close_i > lowest + k * ATR_i. The entry level only moves down.
//   long: track the highest close since entry; exit when
//         close_i < highest - k * ATR_i. The stop only moves up.
//
// The position decided on day i uses bars 0..i only and earns the return
// from close_i to close_{i+1}. No costs, no slippage, no shorting.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "growthscreen/core.hpp"
#include "growthscreen/ingest.hpp"

namespace growthscreen {

struct AtrParams {
    int period = 14;
    double multiplier = 3.0;

    void validate() const {
        if (period < 1) throw std::invalid_argument("ATR period must be >= 1");
        if (!(multiplier > 0.0)) throw std::invalid_argument("ATR multiplier must be positive");
    }
};

enum class Position { Flat = 0, Long = 1 };

/// ATR values aligned to bars: values[j] belongs to bar first_index + j.
struct AtrSeries {
    std::size_t first_index = 0;
    std::vector<double> values;

    bool defined_at(std::size_t bar) const {
        return bar >= first_index && bar - first_index < values.size();
    }
    double at(std::size_t bar) const { return values[bar - first_index]; }
};

struct BacktestResult {
    double sharpe = 0.0;
    std::vector<double> daily_returns;  // bars - 1 entries
    std::vector<Position> positions;    // one per bar
    int trade_count = 0;                // number of entries
};

inline double true_range(const PriceBar& bar, const PriceBar& prev) {
    return std::max({bar.high - bar.low, std::abs(bar.high - prev.close),
                     std::abs(bar.low - prev.close)});
}

inline AtrSeries wilder_atr(std::span<const PriceBar> bars, int period) {
    if (period < 1) throw std::invalid_argument("ATR period must be >= 1");
    const auto p = static_cast<std::size_t>(period);
    if (bars.size() < p + 1)
        throw InsufficientData("ATR(" + std::to_string(period) + ") needs at least " +
                               std::to_string(p + 1) + " bars, got " +
                               std::to_string(bars.size()));
    AtrSeries atr;
    atr.first_index = p;
    atr.values.reserve(bars.size() - p);
    double seed = 0.0;
    for (std::size_t i = 1; i <= p; ++i) seed += true_range(bars[i], bars[i - 1]);
    double current = seed / period;
    atr.values.push_back(current);
    for (std::size_t i = p + 1; i < bars.size(); ++i) {
        current = (current * (period - 1) + true_range(bars[i], bars[i - 1])) / period;
        atr.values.push_back(current);
    }
    return atr;
}

/// Positions of the trailing-stop system; flat until the ATR is defined.
inline std::vector<Position> trend_signals(std::span<const PriceBar> bars, const AtrSeries& atr,
                                           double multiplier) {
    std::vector<Position> positions(bars.size(), Position::Flat);
    if (bars.empty()) return positions;

    constexpr double inf = std::numeric_limits<double>::infinity();
    Position state = Position::Flat;
    double lowest = bars.front().close;
    double highest = 0.0;
    double entry_level = inf;
    double stop_level = -inf;

    for (std::size_t i = 0; i < bars.size(); ++i) {
        const double close = bars[i].close;
        if (!atr.defined_at(i)) {
            lowest = std::min(lowest, close);
            continue;
        }
        const double band = multiplier * atr.at(i);
        if (state == Position::Flat) {
            lowest = std::min(lowest, close);
            entry_level = std::min(entry_level, lowest + band);
            if (close > entry_level) {
                state = Position::Long;
                highest = close;
                stop_level = close - band;
            }
        } else {
            highest = std::max(highest, close);
            stop_level = std::max(stop_level, highest - band);
            if (close < stop_level) {
                state = Position::Flat;
                lowest = close;
                entry_level = inf;
            }
        }
        positions[i] = state;
    }
    return positions;
}

/// r_i = position_i * (close_{i+1} / close_i - 1).
inline std::vector<double> strategy_returns(std::span<const PriceBar> bars,
                                            std::span<const Position> positions) {
    if (positions.size() != bars.size())
        throw std::invalid_argument("positions must align with bars");
    std::vector<double> out;
    if (bars.size() < 2) return out;
    out.reserve(bars.size() - 1);
    for (std::size_t i = 0; i + 1 < bars.size(); ++i)
        out.push_back(positions[i] == Position::Long ? bars[i + 1].close / bars[i].close - 1.0
                                                     : 0.0);
    return out;
}

/// Annualized Sharpe ratio, zero risk-free rate, sample standard deviation.
/// Zero-variance streams (including constant non-zero returns) give 0.
inline double sharpe(std::span<const double> returns, double periods_per_year = 252.0) {
    if (returns.size() < 2) throw InsufficientData("Sharpe ratio needs at least 2 returns");
    const auto [lo, hi] = std::minmax_element(returns.begin(), returns.end());
    if (*lo == *hi) return 0.0;
    const double n = static_cast<double>(returns.size());
    double sum = 0.0;
    for (double r : returns) sum += r;
    const double mean = sum / n;
    double ss = 0.0;
    for (double r : returns) ss += (r - mean) * (r - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (sd == 0.0) return 0.0;
    return mean / sd * std::sqrt(periods_per_year);
}

inline double buy_hold_sharpe(std::span<const PriceBar> bars, double periods_per_year = 252.0) {
    if (bars.size() < 3) throw InsufficientData("buy-and-hold Sharpe needs at least 3 bars");
    std::vector<Position> always_long(bars.size(), Position::Long);
    return sharpe(strategy_returns(bars, always_long), periods_per_year);
}

inline BacktestResult run_trend_backtest(std::span<const PriceBar> bars, const AtrParams& params,
                                         double periods_per_year = 252.0) {
    params.validate();
    BacktestResult result;
    const AtrSeries atr = wilder_atr(bars, params.period);
    result.positions = trend_signals(bars, atr, params.multiplier);
    result.daily_returns = strategy_returns(bars, result.positions);
    result.sharpe = sharpe(result.daily_returns, periods_per_year);
    for (std::size_t i = 0; i < result.positions.size(); ++i)
        if (result.positions[i] == Position::Long &&
            (i == 0 || result.positions[i - 1] == Position::Flat))
            ++result.trade_count;
    return result;
}

}  // namespace growthscreen
