// growthscreen/metrics.hpp
//
// Valuation metrics built on top of the growth fits: the U1 average-growth
// score, price-to-sales and its one-year forecast, TR/GP ratio, and the
// population statistics / histogram of P2S.
//
// Units: regress produces growth as a fraction; everything here works in
// percent (47.42 means 47.42%). percent_from_fraction is the only crossing.
#pragma once

#include <cmath>
#include <algorithm>
#include <optional>
#include <stdexcept>
#include <span>
#include <vector>

#include "growthscreen/core.hpp"

namespace growthscreen {

inline constexpr double percent_from_fraction(double fraction) { return fraction * 100.0; }

struct U1Score {
    double value = 0.0;      // percent
    double growth_tr = 0.0;  // percent
    double growth_gp = 0.0;  // percent
    bool degenerate = false;
};

/// Average of revenue and gross-profit growth.
inline U1Score u1(double growth_tr, double growth_gp, bool degenerate = false) {
    return {(growth_tr + growth_gp) / 2.0, growth_tr, growth_gp, degenerate};
}

inline double p2s(double market_cap, double ttm_revenue) {
    if (!(ttm_revenue > 0.0)) throw UndefinedValue("P2S undefined for non-positive revenue");
    return market_cap / ttm_revenue;
}

/// P2S one year out if U1 growth materializes at constant market cap.
inline double p2s_forecast(double p2s_value, double u1_percent) {
    if (!(u1_percent > -100.0)) throw UndefinedValue("P2S forecast undefined for U1 <= -100%");
    return p2s_value / (1.0 + u1_percent / 100.0);
}

/// TR / GP; empty when GP is zero.
inline std::optional<double> tr_gp_ratio(double tr, double gp) {
    if (gp == 0.0) return std::nullopt;
    return tr / gp;
}

// ---------------------------------------------------------------------------
// Population statistics
// ---------------------------------------------------------------------------

/// P2S reference cutoff: mean 6.89 + 2 * sigma 10.42.
inline constexpr double kReferenceP2sMean = 6.89;
inline constexpr double kReferenceP2sSigma = 10.42;
inline constexpr double kReferenceP2sCutoff = 27.73;

struct PopulationStats {
    double mean = 0.0;
    double sigma = 0.0;  // population standard deviation (divide by N)
    double cutoff = 0.0;  // mean + 2 sigma
    std::size_t count = 0;
};

struct PopulationFilter {
    double cap_floor = 10e9;
    double revenue_floor = 10e6;
};

inline PopulationStats stats_from_moments(double mean, double sigma, std::size_t count = 0) {
    if (sigma < 0) throw std::invalid_argument("sigma must be non-negative");
    return {mean, sigma, mean + 2.0 * sigma, count};
}

/// Moments of the values whose cap and revenue both reach their floors.
inline PopulationStats population_stats(std::span<const double> p2s_values,
                                        std::span<const double> caps,
                                        std::span<const double> revenues,
                                        PopulationFilter filter = {}) {
    if (caps.size() != p2s_values.size() || revenues.size() != p2s_values.size())
        throw std::invalid_argument("population_stats: sequences must be aligned");
    std::vector<double> kept;
    for (std::size_t i = 0; i < p2s_values.size(); ++i)
        if (caps[i] >= filter.cap_floor && revenues[i] >= filter.revenue_floor)
            kept.push_back(p2s_values[i]);
    if (kept.empty()) throw InsufficientData("no values pass the population floors");

    const long double n = static_cast<long double>(kept.size());
    long double sum = 0;
    for (double v : kept) sum += v;
    const long double mean = sum / n;
    long double ss = 0;
    for (double v : kept) ss += (v - mean) * (v - mean);
    const double sigma = static_cast<double>(std::sqrt(ss / n));
    return stats_from_moments(static_cast<double>(mean), sigma, kept.size());
}

// ---------------------------------------------------------------------------
// Histogram
// ---------------------------------------------------------------------------

struct HistogramBin {
    double low = 0.0;
    double high = 0.0;
    std::size_t count = 0;
};

struct Histogram {
    std::vector<HistogramBin> bins;  // half-open [low, high)
    std::size_t overflow = 0;        // values >= range_max
    std::vector<std::size_t> rejected;  // indices of negative or non-finite inputs

    std::size_t accepted() const {
        std::size_t total = overflow;
        for (const auto& b : bins) total += b.count;
        return total;
    }
};

inline Histogram histogram(std::span<const double> values, double bin_width = 1.0,
                           double range_max = 100.0) {
    if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");
    if (!(range_max > 0.0)) throw std::invalid_argument("range max must be positive");
    const auto nbins = static_cast<std::size_t>(std::ceil(range_max / bin_width));
    Histogram h;
    h.bins.reserve(nbins);
    for (std::size_t k = 0; k < nbins; ++k)
        h.bins.push_back({static_cast<double>(k) * bin_width,
                          static_cast<double>(k + 1) * bin_width, 0});
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!std::isfinite(v) || v < 0.0) {
            h.rejected.push_back(i);
            continue;
        }
        if (v >= range_max) {
            ++h.overflow;
            continue;
        }
        auto k = static_cast<std::size_t>(std::floor(v / bin_width));
        // floor(v / w) can land one bin off when v sits on an edge that w
        // does not represent exactly.
        if (k < nbins && v < h.bins[k].low) --k;
        else if (k + 1 < nbins && v >= h.bins[k].high) ++k;
        ++h.bins[std::min(k, nbins - 1)].count;
    }
    return h;
}

}  // namespace growthscreen
