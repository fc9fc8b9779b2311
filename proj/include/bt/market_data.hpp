#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bt/date.hpp"
#include "bt/errors.hpp"

namespace bt {

/// Opaque unique security identifier (PERMNO, ticker, ...).
using SecurityId = std::string;

/// One security-day observation as it appears in the input data.
struct PriceBar {
    SecurityId security;
    Date date;
    double close = 0.0;        // USD, > 0
    double ret_total = 0.0;    // daily fractional return with dividends
    double ret_capital = 0.0;  // daily fractional return without dividends
    double shares_out = 0.0;   // share count, >= 0

    double market_value() const { return close * shares_out; }

    bool operator==(const PriceBar&) const = default;
};

/// Closed date interval of index membership. An absent end means the
/// security never left.
struct DateInterval {
    Date start;
    std::optional<Date> end;

    bool covers(Date d) const { return d >= start && (!end || d <= *end); }

    bool operator==(const DateInterval&) const = default;
};

/// Monthly CPI index levels. Immutable once validated.
class CpiSeries {
public:
    void set(YearMonth month, double level);

    /// Checks contiguous monthly coverage and positive levels.
    void validate() const;

    bool contains(YearMonth month) const;
    double at(YearMonth month) const;  // throws MonthMissing

    bool empty() const { return levels_.empty(); }
    YearMonth first_month() const;
    YearMonth last_month() const;
    const std::map<YearMonth, double>& levels() const { return levels_; }

    bool operator==(const CpiSeries&) const = default;

private:
    std::map<YearMonth, double> levels_;
};

/// Converts `amount` from the price level of month `from` to month `to`.
double deflate(double amount, YearMonth from, YearMonth to, const CpiSeries& cpi);

/// Validated, date-indexed collection of price bars plus constituency
/// intervals and the trading calendar. Immutable after construction and
/// safe for concurrent reads.
class MarketUniverse {
public:
    /// Per-security bar with the security id implied by context.
    struct Bar {
        Date date;
        double close = 0.0;
        double ret_total = 0.0;
        double ret_capital = 0.0;
        double shares_out = 0.0;

        double market_value() const { return close * shares_out; }

        bool operator==(const Bar&) const = default;
    };

    const std::vector<SecurityId>& securities() const { return securities_; }
    const std::vector<Date>& calendar() const { return calendar_; }

    std::optional<std::size_t> security_index(const SecurityId& id) const;
    std::optional<std::size_t> calendar_index(Date d) const;

    const Bar* bar(std::size_t sec, std::size_t day) const;
    const Bar* bar(const SecurityId& id, Date d) const;

    /// Most recent bar at or before calendar position `day`, or nullptr.
    const Bar* last_bar_on_or_before(std::size_t sec, std::size_t day) const;

    const std::vector<Bar>& bars_of(std::size_t sec) const { return secs_[sec].bars; }
    const std::vector<DateInterval>& constituency_of(std::size_t sec) const {
        return secs_[sec].constituency;
    }

    /// Whether the security's constituency intervals cover `d`.
    bool in_constituency(std::size_t sec, Date d) const;

    /// Securities that are constituents on `d` and have a bar on `d`,
    /// ordered by SecurityId. Throws DateNotInCalendar.
    std::vector<SecurityId> constituents_at(Date d) const;

    /// Index form of constituents_at for hot paths; same ordering.
    std::vector<std::size_t> constituent_indices_at(std::size_t day) const;

    /// Contiguous calendar slice belonging to `year` (may be empty).
    std::span<const Date> days_in_year(int year) const;
    std::optional<Date> first_trading_day_of_year(int year) const;

    std::size_t total_bars() const;

    bool operator==(const MarketUniverse& other) const;

private:
    friend class UniverseBuilder;

    struct SecurityData {
        std::vector<Bar> bars;                // sorted by date
        std::vector<std::int32_t> day_to_bar; // calendar index -> bar index or -1
        std::vector<DateInterval> constituency;

        bool operator==(const SecurityData&) const = default;
    };

    std::vector<SecurityId> securities_;  // sorted ascending
    std::vector<Date> calendar_;          // sorted ascending, unique
    std::vector<SecurityData> secs_;
    std::unordered_map<SecurityId, std::size_t> sec_index_;
};

/// Incremental construction with validation; used by the CSV loader and
/// the synthetic generator.
class UniverseBuilder {
public:
    /// Validates bar fields. Throws NonPositivePrice, InvalidInput,
    /// DuplicateBar.
    UniverseBuilder& add_bar(const PriceBar& bar);

    UniverseBuilder& add_constituency(const SecurityId& id, Date start,
                                      std::optional<Date> end);

    /// Finalizes the universe. Securities with no explicit constituency
    /// default to membership over their observed bar span. Calendar gaps
    /// longer than a week are reported through `warnings`.
    MarketUniverse build(std::vector<std::string>* warnings = nullptr);

private:
    struct PendingSecurity {
        std::map<Date, MarketUniverse::Bar> bars;
        std::vector<DateInterval> constituency;
    };

    std::map<SecurityId, PendingSecurity> pending_;
};

/// Loads a universe from `path`: either a securities CSV file, or a
/// directory containing securities.csv and optionally constituency.csv.
/// Securities CSV schema (header required):
///   date,security_id,close,ret_total,ret_capital,shares_out
/// Constituency CSV schema:
///   security_id,start_date,end_date   (end inclusive, empty = open)
MarketUniverse load_universe(const std::filesystem::path& path,
                             std::vector<std::string>* warnings = nullptr);

/// Loads a CPI CSV: header `year_month,cpi`, months formatted YYYY-MM.
CpiSeries load_cpi(const std::filesystem::path& path);

/// Writes securities.csv and constituency.csv under `dir`. Numeric
/// fields round-trip losslessly through load_universe.
void save_universe(const MarketUniverse& u, const std::filesystem::path& dir);

void save_cpi(const CpiSeries& cpi, const std::filesystem::path& path);

}  // namespace bt
