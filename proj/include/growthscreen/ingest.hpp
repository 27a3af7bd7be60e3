// growthscreen/ingest.hpp
//
// CSV readers/writers for the three input schemas, quarterly -> TTM
// conversion, and date windowing.
//
//   fundamentals: symbol,date,total_revenue,gross_profit
//   prices:       symbol,date,open,high,low,close
//   meta:         symbol,market_cap,analyst_count,as_of
//
// UTF-8, comma separated, mandatory header, '.' decimal separator, no
// quoting and no thousands separators. Rows may arrive in any order; output
// series are grouped per symbol and sorted by date.
#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "growthscreen/core.hpp"

namespace growthscreen {

struct FundamentalPoint {
    Date date;
    double total_revenue = 0.0;  // USD, TTM
    double gross_profit = 0.0;   // USD, TTM, may be negative

    friend bool operator==(const FundamentalPoint&, const FundamentalPoint&) = default;
};

struct FundamentalSeries {
    std::string symbol;
    std::vector<FundamentalPoint> points;  // strictly increasing by date

    friend bool operator==(const FundamentalSeries&, const FundamentalSeries&) = default;
};

struct PriceBar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;

    friend bool operator==(const PriceBar&, const PriceBar&) = default;
};

struct CompanyMeta {
    std::string symbol;
    double market_cap = 0.0;
    std::int64_t analyst_count = 0;
    Date as_of;

    friend bool operator==(const CompanyMeta&, const CompanyMeta&) = default;
};

/// One dated amount, the unit of quarterly -> TTM conversion.
struct DatedAmount {
    Date date;
    double amount = 0.0;

    friend bool operator==(const DatedAmount&, const DatedAmount&) = default;
};

using FundamentalsBySymbol = std::map<std::string, FundamentalSeries>;
using PricesBySymbol = std::map<std::string, std::vector<PriceBar>>;
using MetaBySymbol = std::map<std::string, CompanyMeta>;

inline constexpr int kDefaultWindowDays = 250;

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

inline bool is_blank(std::string_view s) {
    return s.find_first_not_of(" \t") == std::string_view::npos;
}

/// Line-oriented reader that validates the header and tracks row numbers.
class CsvRows {
public:
    CsvRows(std::istream& in, std::string_view expected_header) : in_(in) {
        std::string line;
        while (std::getline(in_, line)) {
            ++row_;
            strip(line);
            if (row_ == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
            if (is_blank(line)) continue;
            if (line != expected_header)
                throw SchemaError("row " + std::to_string(row_) + ": expected header '" +
                                  std::string(expected_header) + "', found '" + line + "'");
            has_header_ = true;
            columns_ = split_fields(expected_header).size();
            return;
        }
    }

    /// False when the input held nothing at all (not even a header).
    bool has_header() const { return has_header_; }

    /// Advances to the next non-blank data row.
    bool next() {
        if (!has_header_) return false;
        while (std::getline(in_, line_)) {
            ++row_;
            strip(line_);
            if (is_blank(line_)) continue;
            fields_ = split_fields(line_);
            if (fields_.size() != columns_)
                throw ParseError(row_, "expected " + std::to_string(columns_) + " fields, found " +
                                           std::to_string(fields_.size()));
            return true;
        }
        return false;
    }

    std::size_t row() const { return row_; }
    std::string_view field(std::size_t i) const { return fields_[i]; }

    std::string symbol(std::size_t i) const {
        std::string_view s = fields_[i];
        if (s.empty() || s.find_first_of(" \t") != std::string_view::npos)
            throw ParseError(row_, "invalid symbol '" + std::string(s) + "'");
        return std::string(s);
    }

    Date date(std::size_t i, const char* name) const {
        Date d;
        if (!Date::try_parse(fields_[i], d))
            throw ParseError(row_, std::string("invalid ") + name + " '" + std::string(fields_[i]) +
                                       "' (expected YYYY-MM-DD)");
        return d;
    }

    double number(std::size_t i, const char* name) const {
        double v = 0.0;
        if (!try_parse_number(fields_[i], v))
            throw ParseError(row_, std::string("non-numeric ") + name + " '" +
                                       std::string(fields_[i]) + "'");
        return v;
    }

    std::int64_t integer(std::size_t i, const char* name) const {
        std::string_view s = fields_[i];
        std::int64_t v = 0;
        const char* first = s.data();
        if (!s.empty() && *first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
            throw ParseError(row_, std::string("non-integer ") + name + " '" + std::string(s) + "'");
        return v;
    }

private:
    static void strip(std::string& line) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
    }

    std::istream& in_;
    std::string line_;
    std::vector<std::string_view> fields_;
    std::size_t row_ = 0;
    std::size_t columns_ = 0;
    bool has_header_ = false;
};

/// Sorts each group by date and rejects duplicate dates, naming the later row.
template <typename Item>
void sort_and_check(std::vector<std::pair<Item, std::size_t>>& rows, const std::string& symbol) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first.date < b.first.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].first.date == rows[i - 1].first.date) {
            std::size_t row = std::max(rows[i].second, rows[i - 1].second);
            throw ParseError(row, "duplicate (symbol, date) (" + symbol + ", " +
                                      rows[i].first.date.to_string() + ")");
        }
    }
}

}  // namespace detail

inline constexpr std::string_view kFundamentalsHeader = "symbol,date,total_revenue,gross_profit";
inline constexpr std::string_view kPricesHeader = "symbol,date,open,high,low,close";
inline constexpr std::string_view kMetaHeader = "symbol,market_cap,analyst_count,as_of";

/// Reads a fundamentals CSV. Empty input yields an empty map.
inline FundamentalsBySymbol parse_fundamentals(std::istream& in) {
    detail::CsvRows rows(in, kFundamentalsHeader);
    std::map<std::string, std::vector<std::pair<FundamentalPoint, std::size_t>>> grouped;
    while (rows.next()) {
        FundamentalPoint p;
        std::string symbol = rows.symbol(0);
        p.date = rows.date(1, "date");
        p.total_revenue = rows.number(2, "total_revenue");
        p.gross_profit = rows.number(3, "gross_profit");
        grouped[symbol].emplace_back(p, rows.row());
    }
    FundamentalsBySymbol out;
    for (auto& [symbol, items] : grouped) {
        detail::sort_and_check(items, symbol);
        FundamentalSeries series{symbol, {}};
        series.points.reserve(items.size());
        for (auto& [p, row] : items) series.points.push_back(p);
        out.emplace(symbol, std::move(series));
    }
    return out;
}

/// Reads a prices CSV, enforcing positive prices and low <= open,close <= high.
inline PricesBySymbol parse_prices(std::istream& in) {
    detail::CsvRows rows(in, kPricesHeader);
    std::map<std::string, std::vector<std::pair<PriceBar, std::size_t>>> grouped;
    while (rows.next()) {
        PriceBar b;
        std::string symbol = rows.symbol(0);
        b.date = rows.date(1, "date");
        b.open = rows.number(2, "open");
        b.high = rows.number(3, "high");
        b.low = rows.number(4, "low");
        b.close = rows.number(5, "close");
        if (b.open <= 0 || b.high <= 0 || b.low <= 0 || b.close <= 0)
            throw ParseError(rows.row(), "prices must be positive");
        if (b.high < b.low) throw ParseError(rows.row(), "high < low");
        if (b.low > std::min(b.open, b.close))
            throw ParseError(rows.row(), "low above min(open, close)");
        if (b.high < std::max(b.open, b.close))
            throw ParseError(rows.row(), "high below max(open, close)");
        grouped[symbol].emplace_back(b, rows.row());
    }
    PricesBySymbol out;
    for (auto& [symbol, items] : grouped) {
        detail::sort_and_check(items, symbol);
        std::vector<PriceBar> bars;
        bars.reserve(items.size());
        for (auto& [b, row] : items) bars.push_back(b);
        out.emplace(symbol, std::move(bars));
    }
    return out;
}

/// Reads a meta CSV; one row per symbol.
inline MetaBySymbol parse_meta(std::istream& in) {
    detail::CsvRows rows(in, kMetaHeader);
    MetaBySymbol out;
    while (rows.next()) {
        CompanyMeta m;
        m.symbol = rows.symbol(0);
        m.market_cap = rows.number(1, "market_cap");
        m.analyst_count = rows.integer(2, "analyst_count");
        m.as_of = rows.date(3, "as_of");
        if (m.market_cap < 0) throw ParseError(rows.row(), "negative market_cap");
        if (m.analyst_count < 0) throw ParseError(rows.row(), "negative analyst_count");
        if (!out.emplace(m.symbol, m).second)
            throw ParseError(rows.row(), "duplicate symbol '" + m.symbol + "'");
    }
    return out;
}

// Writers emit the canonical form: header, symbols ascending, dates ascending,
// shortest exact fixed-point numbers.

inline void write_fundamentals(std::ostream& out, const FundamentalsBySymbol& data) {
    out << kFundamentalsHeader << '\n';
    for (const auto& [symbol, series] : data)
        for (const auto& p : series.points)
            out << symbol << ',' << p.date.to_string() << ',' << format_exact(p.total_revenue) << ','
                << format_exact(p.gross_profit) << '\n';
}

inline void write_prices(std::ostream& out, const PricesBySymbol& data) {
    out << kPricesHeader << '\n';
    for (const auto& [symbol, bars] : data)
        for (const auto& b : bars)
            out << symbol << ',' << b.date.to_string() << ',' << format_exact(b.open) << ','
                << format_exact(b.high) << ',' << format_exact(b.low) << ','
                << format_exact(b.close) << '\n';
}

inline void write_meta(std::ostream& out, const MetaBySymbol& data) {
    out << kMetaHeader << '\n';
    for (const auto& [symbol, m] : data)
        out << symbol << ',' << format_exact(m.market_cap) << ',' << m.analyst_count << ','
            << m.as_of.to_string() << '\n';
}

/// Rolling four-quarter sum. Output i holds the sum of quarters i..i+3 and
/// carries the date of quarter i+3. Calendar gaps are not inspected.
inline std::vector<DatedAmount> compute_ttm(std::span<const DatedAmount> quarterly) {
    if (quarterly.size() < 4)
        throw InsufficientData("TTM needs at least 4 quarters, got " +
                               std::to_string(quarterly.size()));
    std::vector<DatedAmount> out;
    out.reserve(quarterly.size() - 3);
    for (std::size_t i = 3; i < quarterly.size(); ++i) {
        double sum = quarterly[i - 3].amount + quarterly[i - 2].amount + quarterly[i - 1].amount +
                     quarterly[i].amount;
        out.push_back({quarterly[i].date, sum});
    }
    return out;
}

/// Applies compute_ttm to both revenue and gross profit of a quarterly series.
inline FundamentalSeries compute_ttm(const FundamentalSeries& quarterly) {
    std::vector<DatedAmount> tr, gp;
    for (const auto& p : quarterly.points) {
        tr.push_back({p.date, p.total_revenue});
        gp.push_back({p.date, p.gross_profit});
    }
    auto tr_ttm = compute_ttm(tr);
    auto gp_ttm = compute_ttm(gp);
    FundamentalSeries out{quarterly.symbol, {}};
    for (std::size_t i = 0; i < tr_ttm.size(); ++i)
        out.points.push_back({tr_ttm[i].date, tr_ttm[i].amount, gp_ttm[i].amount});
    return out;
}

/// Points dated within [as_of - days, as_of], both ends inclusive.
inline FundamentalSeries window(const FundamentalSeries& series, Date as_of,
                                int days = kDefaultWindowDays) {
    if (days < 1) throw std::invalid_argument("window days must be >= 1");
    const Date first = as_of.minus_days(days);
    FundamentalSeries out{series.symbol, {}};
    auto lo = std::lower_bound(series.points.begin(), series.points.end(), first,
                               [](const FundamentalPoint& p, Date d) { return p.date < d; });
    auto hi = std::upper_bound(series.points.begin(), series.points.end(), as_of,
                               [](Date d, const FundamentalPoint& p) { return d < p.date; });
    if (lo < hi) out.points.assign(lo, hi);
    return out;
}

/// Bars dated within [as_of - days, as_of].
inline std::vector<PriceBar> window(std::span<const PriceBar> bars, Date as_of,
                                    int days = kDefaultWindowDays) {
    if (days < 1) throw std::invalid_argument("window days must be >= 1");
    const Date first = as_of.minus_days(days);
    std::vector<PriceBar> out;
    for (const auto& b : bars)
        if (b.date >= first && b.date <= as_of) out.push_back(b);
    return out;
}

}  // namespace growthscreen
