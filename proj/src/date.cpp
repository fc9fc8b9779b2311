#include "bt/date.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace bt {

namespace {

bool parse_uint(std::string_view s, unsigned& out) {
    if (s.empty()) return false;
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return false;
    out = value;
    return true;
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year{year},
                                          std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok()) {
        throw std::invalid_argument("invalid calendar date");
    }
    days_ = std::chrono::sys_days{ymd};
}

std::optional<Date> Date::from_string(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    unsigned y = 0, m = 0, d = 0;
    if (!parse_uint(iso.substr(0, 4), y) || !parse_uint(iso.substr(5, 2), m) ||
        !parse_uint(iso.substr(8, 2), d)) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(y)},
                                          std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return Date{std::chrono::sys_days{ymd}};
}

int Date::year() const {
    return static_cast<int>(std::chrono::year_month_day{days_}.year());
}

unsigned Date::month() const {
    return static_cast<unsigned>(std::chrono::year_month_day{days_}.month());
}

unsigned Date::day() const {
    return static_cast<unsigned>(std::chrono::year_month_day{days_}.day());
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year(), month(), day());
    return buf;
}

Date Date::next_day() const { return Date{days_ + std::chrono::days{1}}; }

int Date::days_since(Date earlier) const {
    return static_cast<int>((days_ - earlier.days_).count());
}

bool Date::is_weekend() const {
    const std::chrono::weekday wd{days_};
    return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

std::optional<YearMonth> YearMonth::from_string(std::string_view ym) {
    if (ym.size() != 7 || ym[4] != '-') return std::nullopt;
    unsigned y = 0, m = 0;
    if (!parse_uint(ym.substr(0, 4), y) || !parse_uint(ym.substr(5, 2), m)) {
        return std::nullopt;
    }
    if (m < 1 || m > 12) return std::nullopt;
    return YearMonth{static_cast<int>(y), m};
}

YearMonth YearMonth::next() const {
    if (month == 12) return {year + 1, 1};
    return {year, month + 1};
}

std::string YearMonth::to_string() const {
    char buf[12];
    std::snprintf(buf, sizeof(buf), "%04d-%02u", year, month);
    return buf;
}

}  // namespace bt
