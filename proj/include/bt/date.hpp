#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace bt {

/// Timezone-free calendar date. Backed by a day count so comparison and
/// day arithmetic are cheap; construction validates the calendar.
class Date {
public:
    Date() = default;
    Date(int year, unsigned month, unsigned day);

    /// Strict ISO-8601 (YYYY-MM-DD). Returns nullopt on any deviation.
    static std::optional<Date> from_string(std::string_view iso);

    int year() const;
    unsigned month() const;
    unsigned day() const;

    std::string to_string() const;

    Date next_day() const;
    int days_since(Date earlier) const;

    /// True for Saturday and Sunday.
    bool is_weekend() const;

    auto operator<=>(const Date&) const = default;

private:
    explicit Date(std::chrono::sys_days d) : days_(d) {}
    std::chrono::sys_days days_{};
};

/// Calendar month. Keys the CPI series and fee deflation.
struct YearMonth {
    int year = 0;
    unsigned month = 1;

    static YearMonth of(Date d) { return {d.year(), d.month()}; }

    /// Strict YYYY-MM.
    static std::optional<YearMonth> from_string(std::string_view ym);

    /// Months since year 0; adjacent months differ by exactly 1.
    int index() const { return year * 12 + static_cast<int>(month) - 1; }

    YearMonth next() const;
    std::string to_string() const;

    auto operator<=>(const YearMonth&) const = default;
};

}  // namespace bt
