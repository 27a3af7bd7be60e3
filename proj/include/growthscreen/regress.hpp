// growthscreen/regress.hpp
//
// Ordinary least squares over (timestamp, value) points and annualized
// growth extrapolation from the fitted line.
//
// Two fitting routes are provided:
//  * accumulate_sums + solve_line: the classic single-pass five-sum form
//    (count, sum x, sum y, sum xy, sum xx). Cheap and SQL-friendly, but with
//    epoch timestamps (~1.6e9 s) sum_xx reaches ~1e19 and the denominator
//    n*sum_xx - sum_x^2 cancels catastrophically.
//  * fit_line_stable: centered two-pass form with extended-precision
//    accumulators. This is the route used by the screening pipeline.
#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "growthscreen/core.hpp"

namespace growthscreen {

/// Seconds in the growth year used for annualization (366 days).
inline constexpr double kGrowthYearSeconds = 31'622'400.0;

struct TimedValue {
    double t = 0.0;  // seconds since epoch
    double y = 0.0;  // amount
};

struct RegressionSums {
    long long n = 0;
    double sum_x = 0.0;
    double sum_y = 0.0;
    double sum_xy = 0.0;
    double sum_xx = 0.0;
};

/// y = slope * t + intercept, fitted over n points.
///
/// The fit also remembers the centroid it was computed around; value_at()
/// evaluates relative to it, which avoids the cancellation in
/// slope * t + intercept when t is epoch-scale.
struct LineFit {
    double slope = 0.0;      // amount per second
    double intercept = 0.0;  // amount at t = 0
    long long n = 0;
    double center_t = 0.0;
    double center_y = 0.0;

    double value_at(double t) const {
        return static_cast<double>(static_cast<long double>(center_y) +
                                   static_cast<long double>(slope) *
                                       (static_cast<long double>(t) - center_t));
    }
};

struct GrowthEstimate {
    double growth = 0.0;      // annual relative growth, fraction
    double fitted_now = 0.0;  // fitted value at the evaluation time
    bool degenerate = false;  // fitted_now <= 0
};

inline RegressionSums accumulate_sums(std::span<const TimedValue> points) {
    RegressionSums s;
    for (const auto& p : points) {
        ++s.n;
        s.sum_x += p.t;
        s.sum_y += p.y;
        s.sum_xy += p.t * p.y;
        s.sum_xx += p.t * p.t;
    }
    return s;
}

/// Closed-form solution of the normal equations from accumulated sums.
inline LineFit solve_line(const RegressionSums& s) {
    if (s.n < 2) throw InsufficientData("line fit needs at least 2 points");
    const double n = static_cast<double>(s.n);
    const double denom = n * s.sum_xx - s.sum_x * s.sum_x;
    if (denom == 0.0 || !std::isfinite(denom))
        throw SingularFit("line fit is singular (all timestamps equal)");
    LineFit fit;
    fit.slope = (n * s.sum_xy - s.sum_x * s.sum_y) / denom;
    fit.intercept = (s.sum_y - fit.slope * s.sum_x) / n;
    fit.n = s.n;
    fit.center_t = s.sum_x / n;
    fit.center_y = s.sum_y / n;
    return fit;
}

/// Centered least squares. Coordinates are first shifted by the first point
/// (exact for the integer-second timestamps produced by Date), then centered
/// on the means in long double.
inline LineFit fit_line_stable(std::span<const TimedValue> points) {
    if (points.size() < 2) throw InsufficientData("line fit needs at least 2 points");
    using ld = long double;
    const ld t0 = points.front().t;
    const ld y0 = points.front().y;
    const ld n = static_cast<ld>(points.size());

    ld sum_dt = 0, sum_dy = 0;
    for (const auto& p : points) {
        sum_dt += p.t - t0;
        sum_dy += p.y - y0;
    }
    const ld mean_dt = sum_dt / n;
    const ld mean_dy = sum_dy / n;

    ld sxx = 0, sxy = 0;
    for (const auto& p : points) {
        const ld dt = (p.t - t0) - mean_dt;
        const ld dy = (p.y - y0) - mean_dy;
        sxx += dt * dt;
        sxy += dt * dy;
    }
    if (sxx == 0) throw SingularFit("line fit is singular (all timestamps equal)");

    const ld slope = sxy / sxx;
    const ld mean_t = t0 + mean_dt;
    const ld mean_y = y0 + mean_dy;

    LineFit fit;
    fit.slope = static_cast<double>(slope);
    // intercept = mean_y - slope * mean_t, evaluated around the first point so
    // exact inputs give exact intercepts.
    fit.intercept = static_cast<double>((y0 + (mean_dy - slope * mean_dt)) - slope * t0);
    fit.n = static_cast<long long>(points.size());
    fit.center_t = static_cast<double>(mean_t);
    fit.center_y = static_cast<double>(mean_y);
    return fit;
}

/// Annual growth extrapolated from the line:
///   growth = slope * year / fitted(t_eval)
/// Throws UndefinedValue when the fitted value is exactly zero.
inline GrowthEstimate annual_growth(const LineFit& fit, double t_eval) {
    GrowthEstimate g;
    g.fitted_now = fit.value_at(t_eval);
    // Values within the rounding noise of the evaluation count as zero.
    const double noise = 16.0 * std::numeric_limits<double>::epsilon() *
                         (std::abs(fit.center_y) + std::abs(fit.slope * (t_eval - fit.center_t)));
    if (std::abs(g.fitted_now) <= noise)
        throw UndefinedValue("fitted value is zero at evaluation time; growth undefined");
    g.growth = fit.slope * kGrowthYearSeconds / g.fitted_now;
    g.degenerate = g.fitted_now <= 0.0;
    return g;
}

}  // namespace growthscreen
