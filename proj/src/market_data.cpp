#include "bt/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>

namespace bt {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string field = line.substr(start, comma == std::string::npos
                                                   ? std::string::npos
                                                   : comma - start);
        // trim surrounding whitespace
        const auto b = field.find_first_not_of(" \t");
        const auto e = field.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? std::string{}
                                             : field.substr(b, e - b + 1));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Reads non-empty lines of a text file, stripping trailing '\r'.
/// Line numbers in `lines` are 1-based positions in the file.
std::vector<std::pair<std::size_t, std::string>> read_lines(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + path.string());
    }
    std::vector<std::pair<std::size_t, std::string>> lines;
    std::string line;
    std::size_t num = 0;
    while (std::getline(in, line)) {
        ++num;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        lines.emplace_back(num, line);
    }
    return lines;
}

}  // namespace

// ---------------------------------------------------------------------------
// CpiSeries

void CpiSeries::set(YearMonth month, double level) { levels_[month] = level; }

void CpiSeries::validate() const {
    if (levels_.empty()) {
        throw Error(ErrorKind::InvalidInput, "CPI series is empty");
    }
    std::optional<YearMonth> prev;
    for (const auto& [month, level] : levels_) {
        if (level <= 0.0) {
            throw Error(ErrorKind::InvalidInput,
                        "CPI level for " + month.to_string() + " is not positive");
        }
        if (prev && prev->next() != month) {
            throw Error(ErrorKind::MonthMissing,
                        "CPI series has a gap between " + prev->to_string() +
                            " and " + month.to_string());
        }
        prev = month;
    }
}

bool CpiSeries::contains(YearMonth month) const { return levels_.count(month) > 0; }

double CpiSeries::at(YearMonth month) const {
    const auto it = levels_.find(month);
    if (it == levels_.end()) {
        throw Error(ErrorKind::MonthMissing,
                    "CPI has no level for " + month.to_string());
    }
    return it->second;
}

YearMonth CpiSeries::first_month() const {
    if (levels_.empty()) throw Error(ErrorKind::MonthMissing, "CPI series is empty");
    return levels_.begin()->first;
}

YearMonth CpiSeries::last_month() const {
    if (levels_.empty()) throw Error(ErrorKind::MonthMissing, "CPI series is empty");
    return levels_.rbegin()->first;
}

double deflate(double amount, YearMonth from, YearMonth to, const CpiSeries& cpi) {
    return amount * cpi.at(to) / cpi.at(from);
}

// ---------------------------------------------------------------------------
// MarketUniverse

std::optional<std::size_t> MarketUniverse::security_index(const SecurityId& id) const {
    const auto it = sec_index_.find(id);
    if (it == sec_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> MarketUniverse::calendar_index(Date d) const {
    const auto it = std::lower_bound(calendar_.begin(), calendar_.end(), d);
    if (it == calendar_.end() || *it != d) return std::nullopt;
    return static_cast<std::size_t>(it - calendar_.begin());
}

const MarketUniverse::Bar* MarketUniverse::bar(std::size_t sec, std::size_t day) const {
    const auto& sd = secs_[sec];
    const std::int32_t slot = sd.day_to_bar[day];
    return slot < 0 ? nullptr : &sd.bars[static_cast<std::size_t>(slot)];
}

const MarketUniverse::Bar* MarketUniverse::bar(const SecurityId& id, Date d) const {
    const auto sec = security_index(id);
    if (!sec) return nullptr;
    const auto day = calendar_index(d);
    if (!day) return nullptr;
    return bar(*sec, *day);
}

const MarketUniverse::Bar* MarketUniverse::last_bar_on_or_before(std::size_t sec,
                                                                 std::size_t day) const {
    const auto& sd = secs_[sec];
    const Date cutoff = calendar_[day];
    auto it = std::upper_bound(sd.bars.begin(), sd.bars.end(), cutoff,
                               [](Date d, const Bar& b) { return d < b.date; });
    if (it == sd.bars.begin()) return nullptr;
    return &*std::prev(it);
}

bool MarketUniverse::in_constituency(std::size_t sec, Date d) const {
    for (const auto& interval : secs_[sec].constituency) {
        if (interval.covers(d)) return true;
    }
    return false;
}

std::vector<SecurityId> MarketUniverse::constituents_at(Date d) const {
    const auto day = calendar_index(d);
    if (!day) {
        throw Error(ErrorKind::DateNotInCalendar,
                    d.to_string() + " is not a trading date in this universe");
    }
    std::vector<SecurityId> out;
    for (const std::size_t sec : constituent_indices_at(*day)) {
        out.push_back(securities_[sec]);
    }
    return out;
}

std::vector<std::size_t> MarketUniverse::constituent_indices_at(std::size_t day) const {
    const Date d = calendar_[day];
    std::vector<std::size_t> out;
    for (std::size_t sec = 0; sec < securities_.size(); ++sec) {
        if (secs_[sec].day_to_bar[day] >= 0 && in_constituency(sec, d)) {
            out.push_back(sec);
        }
    }
    return out;
}

std::span<const Date> MarketUniverse::days_in_year(int year) const {
    const auto lo = std::lower_bound(calendar_.begin(), calendar_.end(),
                                     Date(year, 1, 1));
    const auto hi = std::lower_bound(lo, calendar_.end(), Date(year + 1, 1, 1));
    return {calendar_.data() + (lo - calendar_.begin()),
            static_cast<std::size_t>(hi - lo)};
}

std::optional<Date> MarketUniverse::first_trading_day_of_year(int year) const {
    const auto days = days_in_year(year);
    if (days.empty()) return std::nullopt;
    return days.front();
}

std::size_t MarketUniverse::total_bars() const {
    std::size_t n = 0;
    for (const auto& sd : secs_) n += sd.bars.size();
    return n;
}

bool MarketUniverse::operator==(const MarketUniverse& other) const {
    return securities_ == other.securities_ && calendar_ == other.calendar_ &&
           secs_ == other.secs_;
}

// ---------------------------------------------------------------------------
// UniverseBuilder

UniverseBuilder& UniverseBuilder::add_bar(const PriceBar& bar) {
    if (bar.security.empty()) {
        throw Error(ErrorKind::InvalidInput, "empty security id");
    }
    if (bar.close <= 0.0) {
        throw Error(ErrorKind::NonPositivePrice,
                    bar.security + " on " + bar.date.to_string() + " has close " +
                        format_double(bar.close));
    }
    if (bar.ret_capital < -1.0 || bar.ret_total < bar.ret_capital) {
        throw Error(ErrorKind::InvalidInput,
                    bar.security + " on " + bar.date.to_string() +
                        " violates ret_total >= ret_capital >= -1");
    }
    if (bar.shares_out < 0.0) {
        throw Error(ErrorKind::InvalidInput,
                    bar.security + " on " + bar.date.to_string() +
                        " has negative shares outstanding");
    }
    auto& sec = pending_[bar.security];
    const MarketUniverse::Bar stored{bar.date, bar.close, bar.ret_total,
                                     bar.ret_capital, bar.shares_out};
    if (!sec.bars.emplace(bar.date, stored).second) {
        throw Error(ErrorKind::DuplicateBar,
                    "duplicate bar for " + bar.security + " on " +
                        bar.date.to_string());
    }
    return *this;
}

UniverseBuilder& UniverseBuilder::add_constituency(const SecurityId& id, Date start,
                                                   std::optional<Date> end) {
    if (id.empty()) {
        throw Error(ErrorKind::InvalidInput, "empty security id");
    }
    if (end && *end < start) {
        throw Error(ErrorKind::InvalidInput,
                    "constituency interval for " + id + " ends before it starts");
    }
    pending_[id].constituency.push_back({start, end});
    return *this;
}

MarketUniverse UniverseBuilder::build(std::vector<std::string>* warnings) {
    MarketUniverse u;

    std::vector<Date> all_dates;
    for (const auto& [id, sec] : pending_) {
        u.securities_.push_back(id);
        for (const auto& [date, bar] : sec.bars) all_dates.push_back(date);
    }
    std::sort(all_dates.begin(), all_dates.end());
    all_dates.erase(std::unique(all_dates.begin(), all_dates.end()), all_dates.end());
    u.calendar_ = std::move(all_dates);

    if (warnings) {
        for (std::size_t i = 1; i < u.calendar_.size(); ++i) {
            const int gap = u.calendar_[i].days_since(u.calendar_[i - 1]);
            if (gap > 7) {
                warnings->push_back("calendar gap of " + std::to_string(gap) +
                                    " days between " + u.calendar_[i - 1].to_string() +
                                    " and " + u.calendar_[i].to_string());
            }
        }
    }

    u.secs_.reserve(pending_.size());
    std::size_t index = 0;
    for (auto& [id, sec] : pending_) {
        MarketUniverse::SecurityData sd;
        sd.bars.reserve(sec.bars.size());
        for (auto& [date, bar] : sec.bars) sd.bars.push_back(bar);

        sd.constituency = std::move(sec.constituency);
        if (sd.constituency.empty() && !sd.bars.empty()) {
            sd.constituency.push_back({sd.bars.front().date, sd.bars.back().date});
        }
        std::sort(sd.constituency.begin(), sd.constituency.end(),
                  [](const DateInterval& a, const DateInterval& b) {
                      return a.start < b.start;
                  });
        for (std::size_t i = 1; i < sd.constituency.size(); ++i) {
            const auto& prev = sd.constituency[i - 1];
            if (!prev.end || *prev.end >= sd.constituency[i].start) {
                throw Error(ErrorKind::InvalidInput,
                            "overlapping constituency intervals for " + id);
            }
        }

        sd.day_to_bar.assign(u.calendar_.size(), -1);
        for (std::size_t b = 0; b < sd.bars.size(); ++b) {
            const auto day = u.calendar_index(sd.bars[b].date);
            sd.day_to_bar[*day] = static_cast<std::int32_t>(b);
        }

        u.sec_index_.emplace(id, index++);
        u.secs_.push_back(std::move(sd));
    }
    return u;
}

// ---------------------------------------------------------------------------
// CSV load / save

namespace {

void expect_header(const std::filesystem::path& path,
                   const std::vector<std::pair<std::size_t, std::string>>& lines,
                   const std::string& expected) {
    if (lines.empty()) {
        throw Error(ErrorKind::MalformedRow, path.string() + ": file is empty");
    }
    std::string got = lines.front().second;
    for (char& c : got) c = static_cast<char>(std::tolower(c));
    got.erase(std::remove_if(got.begin(), got.end(),
                             [](char c) { return c == ' ' || c == '\t'; }),
              got.end());
    if (got != expected) {
        throw Error(ErrorKind::MalformedRow,
                    path.string() + ": expected header '" + expected + "', got '" +
                        lines.front().second + "'");
    }
}

std::string row_context(const std::filesystem::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

void load_security_csv(const std::filesystem::path& path, UniverseBuilder& builder) {
    const auto lines = read_lines(path);
    expect_header(path, lines, "date,security_id,close,ret_total,ret_capital,shares_out");

    // duplicate detection with line numbers, so the error can name both rows
    std::map<std::pair<SecurityId, Date>, std::size_t> seen;

    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& [lineno, text] = lines[i];
        const auto fields = split_fields(text);
        if (fields.size() != 6) {
            throw Error(ErrorKind::MalformedRow,
                        row_context(path, lineno) + ": expected 6 fields, got " +
                            std::to_string(fields.size()));
        }
        const auto date = Date::from_string(fields[0]);
        if (!date) {
            throw Error(ErrorKind::MalformedRow,
                        row_context(path, lineno) + ": bad date '" + fields[0] + "'");
        }
        if (fields[1].empty()) {
            throw Error(ErrorKind::MalformedRow,
                        row_context(path, lineno) + ": empty security_id");
        }
        PriceBar bar;
        bar.date = *date;
        bar.security = fields[1];
        const char* names[] = {"close", "ret_total", "ret_capital", "shares_out"};
        double* slots[] = {&bar.close, &bar.ret_total, &bar.ret_capital,
                           &bar.shares_out};
        for (int f = 0; f < 4; ++f) {
            if (!parse_double(fields[2 + f], *slots[f])) {
                throw Error(ErrorKind::MalformedRow,
                            row_context(path, lineno) + ": bad " + names[f] + " '" +
                                fields[2 + f] + "'");
            }
        }

        const auto key = std::make_pair(bar.security, bar.date);
        const auto inserted = seen.emplace(key, lineno);
        if (!inserted.second) {
            throw Error(ErrorKind::DuplicateBar,
                        path.string() + ": duplicate bar for " + bar.security +
                            " on " + bar.date.to_string() + " (lines " +
                            std::to_string(inserted.first->second) + " and " +
                            std::to_string(lineno) + ")");
        }

        try {
            builder.add_bar(bar);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NonPositivePrice) {
                throw Error(ErrorKind::NonPositivePrice,
                            row_context(path, lineno) + ": " + e.what());
            }
            throw Error(ErrorKind::MalformedRow,
                        row_context(path, lineno) + ": " + e.what());
        }
    }
}

void load_constituency_csv(const std::filesystem::path& path,
                           UniverseBuilder& builder) {
    const auto lines = read_lines(path);
    expect_header(path, lines, "security_id,start_date,end_date");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& [lineno, text] = lines[i];
        const auto fields = split_fields(text);
        if (fields.size() != 3) {
            throw Error(ErrorKind::MalformedRow,
                        row_context(path, lineno) + ": expected 3 fields, got " +
                            std::to_string(fields.size()));
        }
        if (fields[0].empty()) {
            throw Error(ErrorKind::MalformedRow,
                        row_context(path, lineno) + ": empty security_id");
        }
        const auto start = Date::from_string(fields[1]);
        if (!start) {
            throw Error(ErrorKind::MalformedRow,
                        row_context(path, lineno) + ": bad start_date '" +
                            fields[1] + "'");
        }
        std::optional<Date> end;
        if (!fields[2].empty()) {
            end = Date::from_string(fields[2]);
            if (!end) {
                throw Error(ErrorKind::MalformedRow,
                            row_context(path, lineno) + ": bad end_date '" +
                                fields[2] + "'");
            }
        }
        try {
            builder.add_constituency(fields[0], *start, end);
        } catch (const Error& e) {
            throw Error(ErrorKind::MalformedRow,
                        row_context(path, lineno) + ": " + e.what());
        }
    }
}

}  // namespace

MarketUniverse load_universe(const std::filesystem::path& path,
                             std::vector<std::string>* warnings) {
    UniverseBuilder builder;
    if (std::filesystem::is_directory(path)) {
        const auto securities = path / "securities.csv";
        if (!std::filesystem::exists(securities)) {
            throw Error(ErrorKind::Io, "no securities.csv in " + path.string());
        }
        load_security_csv(securities, builder);
        const auto constituency = path / "constituency.csv";
        if (std::filesystem::exists(constituency)) {
            load_constituency_csv(constituency, builder);
        }
    } else if (std::filesystem::exists(path)) {
        load_security_csv(path, builder);
    } else {
        throw Error(ErrorKind::Io, path.string() + " does not exist");
    }
    return builder.build(warnings);
}

CpiSeries load_cpi(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    expect_header(path, lines, "year_month,cpi");
    CpiSeries cpi;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& [lineno, text] = lines[i];
        const auto fields = split_fields(text);
        if (fields.size() != 2) {
            throw Error(ErrorKind::MalformedRow,
                        row_context(path, lineno) + ": expected 2 fields, got " +
                            std::to_string(fields.size()));
        }
        const auto month = YearMonth::from_string(fields[0]);
        if (!month) {
            throw Error(ErrorKind::MalformedRow,
                        row_context(path, lineno) + ": bad year_month '" +
                            fields[0] + "'");
        }
        double level = 0.0;
        if (!parse_double(fields[1], level) || level <= 0.0) {
            throw Error(ErrorKind::MalformedRow,
                        row_context(path, lineno) + ": bad cpi level '" +
                            fields[1] + "'");
        }
        if (cpi.contains(*month)) {
            throw Error(ErrorKind::MalformedRow,
                        row_context(path, lineno) + ": duplicate month " +
                            month->to_string());
        }
        cpi.set(*month, level);
    }
    cpi.validate();
    return cpi;
}

void save_universe(const MarketUniverse& u, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    std::ofstream sec_out(dir / "securities.csv");
    if (!sec_out) {
        throw Error(ErrorKind::Io, "cannot write " + (dir / "securities.csv").string());
    }
    sec_out << "date,security_id,close,ret_total,ret_capital,shares_out\n";
    // rows sorted by (date, security) to match the loader's canonical order
    for (std::size_t day = 0; day < u.calendar().size(); ++day) {
        for (std::size_t sec = 0; sec < u.securities().size(); ++sec) {
            const auto* bar = u.bar(sec, day);
            if (!bar) continue;
            sec_out << bar->date.to_string() << ',' << u.securities()[sec] << ','
                    << format_double(bar->close) << ','
                    << format_double(bar->ret_total) << ','
                    << format_double(bar->ret_capital) << ','
                    << format_double(bar->shares_out) << '\n';
        }
    }

    std::ofstream con_out(dir / "constituency.csv");
    if (!con_out) {
        throw Error(ErrorKind::Io,
                    "cannot write " + (dir / "constituency.csv").string());
    }
    con_out << "security_id,start_date,end_date\n";
    for (std::size_t sec = 0; sec < u.securities().size(); ++sec) {
        for (const auto& interval : u.constituency_of(sec)) {
            con_out << u.securities()[sec] << ',' << interval.start.to_string() << ','
                    << (interval.end ? interval.end->to_string() : std::string{})
                    << '\n';
        }
    }
}

void save_cpi(const CpiSeries& cpi, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write " + path.string());
    }
    out << "year_month,cpi\n";
    for (const auto& [month, level] : cpi.levels()) {
        out << month.to_string() << ',' << format_double(level) << '\n';
    }
}

}  // namespace bt
