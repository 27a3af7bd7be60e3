// growthscreen/core.hpp
//
// Shared vocabulary: calendar dates, the error hierarchy, and small numeric
// helpers used by every other header.
#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace growthscreen {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A malformed input row. `row()` is the 1-based line number in the source
/// (the header is line 1).
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& what)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Header row missing or not matching the expected column list.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Not enough observations for the requested computation.
class InsufficientData : public Error {
public:
    using Error::Error;
};

/// Least-squares denominator vanished (all abscissae equal).
class SingularFit : public Error {
public:
    using Error::Error;
};

/// A ratio whose denominator is zero or outside its domain.
class UndefinedValue : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Dates
// ---------------------------------------------------------------------------

/// Calendar date, UTC, day precision.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
    constexpr Date(int y, unsigned m, unsigned d)
        : days_(std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                            std::chrono::day{d}}) {}

    /// Strict `YYYY-MM-DD`; nothing else is accepted.
    static bool try_parse(std::string_view text, Date& out) {
        if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
        int y = 0;
        unsigned m = 0, d = 0;
        if (!parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m) ||
            !parse_digits(text.substr(8, 2), d))
            return false;
        std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
        if (!ymd.ok()) return false;
        out = Date{std::chrono::sys_days{ymd}};
        return true;
    }

    static Date parse(std::string_view text) {
        Date d;
        if (!try_parse(text, d))
            throw Error("invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
        return d;
    }

    constexpr std::chrono::sys_days days() const { return days_; }

    /// Seconds since the Unix epoch at 00:00:00 UTC of this date.
    constexpr double epoch_seconds() const {
        return static_cast<double>(days_.time_since_epoch().count()) * 86400.0;
    }

    constexpr Date minus_days(int n) const { return Date{days_ - std::chrono::days{n}}; }
    constexpr Date plus_days(int n) const { return Date{days_ + std::chrono::days{n}}; }

    std::string to_string() const {
        std::chrono::year_month_day ymd{days_};
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
        return buf;
    }

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

private:
    template <typename Int>
    static bool parse_digits(std::string_view s, Int& out) {
        for (char c : s)
            if (c < '0' || c > '9') return false;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && ptr == s.data() + s.size();
    }

    std::chrono::sys_days days_{};
};

/// Current UTC calendar date.
inline Date today_utc() {
    return Date{std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now())};
}

/// Wall-clock seconds since the Unix epoch.
inline double now_epoch_seconds() {
    using namespace std::chrono;
    return duration<double>(system_clock::now().time_since_epoch()).count();
}

// ---------------------------------------------------------------------------
// Numbers
// ---------------------------------------------------------------------------

/// Parses a finite decimal number, rejecting trailing garbage.
inline bool try_parse_number(std::string_view text, double& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(out);
}

/// Shortest fixed-notation text that parses back to exactly `value`.
inline std::string format_exact(double value) {
    char buf[400];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
    if (ec != std::errc{}) throw Error("cannot format number");
    return std::string(buf, ptr);
}

/// Fixed-point rendering with `decimals` places; never prints "-0.00".
inline std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    std::string s(buf);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

}  // namespace growthscreen
