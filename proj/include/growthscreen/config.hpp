// growthscreen/config.hpp
//
// Run configuration: every tunable of the pipeline in one place, loadable
// from a `key = value` file. Command-line flags override file values, which
// override the defaults below.
#pragma once

#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "growthscreen/core.hpp"
#include "growthscreen/metrics.hpp"
#include "growthscreen/screen.hpp"

namespace growthscreen {

enum class EvalAt { LastDataDate, WallClock };
enum class OutputFormat { Csv, Json, Markdown };

struct RunConfig {
    int window_days = kDefaultWindowDays;
    int atr_period = 14;
    double atr_multiplier = 3.0;
    CutoffMode cutoff_mode = CutoffMode::Computed;
    int top_n = 10;
    EvalAt eval_at = EvalAt::LastDataDate;
    BucketThresholds thresholds;
    OutputFormat output_format = OutputFormat::Csv;
    bool strict_c4 = false;
    bool quarterly = false;
    double cap_floor = 10e9;
    double revenue_floor = 10e6;
    double bin_width = 1.0;
    double range_max = 100.0;

    void validate() const {
        if (window_days < 1) throw std::invalid_argument("window_days must be >= 1");
        if (atr_period < 1) throw std::invalid_argument("atr_period must be >= 1");
        if (!(atr_multiplier > 0)) throw std::invalid_argument("atr_multiplier must be positive");
        if (top_n < 1) throw std::invalid_argument("top_n must be >= 1");
        if (!(bin_width > 0)) throw std::invalid_argument("bin_width must be positive");
        if (!(range_max > 0)) throw std::invalid_argument("range_max must be positive");
        if (cap_floor < 0 || revenue_floor < 0)
            throw std::invalid_argument("population floors must be non-negative");
        thresholds.validate();
    }

    ScreenConfig screen_config(double wall_clock_seconds) const {
        ScreenConfig c;
        c.window_days = window_days;
        c.atr = {atr_period, atr_multiplier};
        c.thresholds = thresholds;
        c.constraints.strict_c4 = strict_c4;
        if (eval_at == EvalAt::WallClock) c.eval_time = wall_clock_seconds;
        return c;
    }
};

/// Raised for unknown keys or malformed values in a config file.
class ConfigError : public Error {
public:
    using Error::Error;
};

// String <-> enum helpers shared by the config file and the CLI.

inline CutoffMode parse_cutoff_mode(std::string_view s) {
    if (s == "computed") return CutoffMode::Computed;
    if (s == "pinned") return CutoffMode::Pinned;
    throw ConfigError("p2s cutoff mode must be 'computed' or 'pinned', got '" + std::string(s) + "'");
}

inline EvalAt parse_eval_at(std::string_view s) {
    if (s == "last-data-date") return EvalAt::LastDataDate;
    if (s == "wall-clock") return EvalAt::WallClock;
    throw ConfigError("eval_at must be 'last-data-date' or 'wall-clock', got '" + std::string(s) + "'");
}

inline OutputFormat parse_output_format(std::string_view s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    if (s == "markdown" || s == "md") return OutputFormat::Markdown;
    throw ConfigError("output format must be csv, json or markdown, got '" + std::string(s) + "'");
}

/// Five comma-separated values: mega,big,mid,small,micro lower bounds.
inline BucketThresholds parse_thresholds(std::string_view s) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t comma = s.find(',', start);
        std::string_view part = s.substr(start, comma == std::string_view::npos ? s.npos : comma - start);
        while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
        while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
        double v = 0;
        if (!try_parse_number(part, v))
            throw ConfigError("bucket thresholds: '" + std::string(part) + "' is not a number");
        values.push_back(v);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (values.size() != 5) throw ConfigError("bucket thresholds need exactly 5 values");
    BucketThresholds t{values[0], values[1], values[2], values[3], values[4]};
    try {
        t.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return t;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline int config_int(std::string_view key, std::string_view value) {
    double v = 0;
    if (!try_parse_number(value, v) || v != static_cast<int>(v))
        throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(value) + "'");
    return static_cast<int>(v);
}

inline double config_number(std::string_view key, std::string_view value) {
    double v = 0;
    if (!try_parse_number(value, v))
        throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(value) + "'");
    return v;
}

inline bool config_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(value) + "'");
}

}  // namespace detail

/// Applies `key = value` lines on top of `base`. Blank lines and lines
/// starting with '#' are ignored.
inline RunConfig load_config(std::istream& in, RunConfig base = {}) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = detail::trim(line);
        if (view.empty() || view.front() == '#') continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string_view key = detail::trim(view.substr(0, eq));
        const std::string_view value = detail::trim(view.substr(eq + 1));
        try {
            if (key == "window_days") base.window_days = detail::config_int(key, value);
            else if (key == "atr_period") base.atr_period = detail::config_int(key, value);
            else if (key == "atr_multiplier") base.atr_multiplier = detail::config_number(key, value);
            else if (key == "p2s_cutoff_mode") base.cutoff_mode = parse_cutoff_mode(value);
            else if (key == "top_n") base.top_n = detail::config_int(key, value);
            else if (key == "eval_at") base.eval_at = parse_eval_at(value);
            else if (key == "bucket_thresholds") base.thresholds = parse_thresholds(value);
            else if (key == "output_format") base.output_format = parse_output_format(value);
            else if (key == "strict_c4") base.strict_c4 = detail::config_bool(key, value);
            else if (key == "quarterly") base.quarterly = detail::config_bool(key, value);
            else if (key == "cap_floor") base.cap_floor = detail::config_number(key, value);
            else if (key == "revenue_floor") base.revenue_floor = detail::config_number(key, value);
            else if (key == "bin_width") base.bin_width = detail::config_number(key, value);
            else if (key == "range_max") base.range_max = detail::config_number(key, value);
            else throw ConfigError("unknown key '" + std::string(key) + "'");
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

}  // namespace growthscreen
