#include "bt/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace bt {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);  // binary keeps \n on all platforms
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write " + path.string());
    }
    return out;
}

std::string money(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

}  // namespace

void write_values_csv(const BacktestResult& r, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "date,total_value\n";
    for (const auto& [date, value] : r.daily_values) {
        out << date.to_string() << ',' << money(value) << '\n';
    }
}

void write_trades_csv(const BacktestResult& r, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "date,security_id,shares_delta,price,admin_fee,spread_fee\n";
    for (const auto& t : r.trades) {
        out << t.date.to_string() << ',' << t.security << ','
            << fixed(t.shares_traded, 6) << ',' << money(t.price) << ','
            << money(t.admin_component) << ',' << money(t.spread_component)
            << '\n';
    }
}

void write_annual_csv(const std::map<int, double>& per_year,
                      const AnnualStats* stats,
                      const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "year,return_pct\n";
    for (const auto& [year, pct] : per_year) {
        out << year << ',' << fixed(pct, 4) << '\n';
    }
    if (stats) {
        out << "arithmetic," << fixed(stats->arithmetic, 4) << '\n';
        out << "geometric," << fixed(stats->geometric, 4) << '\n';
        out << "sd," << fixed(stats->sd, 4) << '\n';
        out << "sharpe," << fixed(stats->sharpe, 4) << '\n';
    }
}

void write_selections_csv(const BacktestResult& r,
                          const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "year,rank,security_id,median_ratio\n";
    for (const auto& [year, picks] : r.selections) {
        int rank = 1;
        for (const auto& pick : picks) {
            out << year << ',' << rank++ << ',' << pick.security << ','
                << fixed(pick.median, 9) << '\n';
        }
    }
}

void write_final_values_csv(const std::vector<BacktestResult>& results,
                            const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "strategy,initial,final_value\n";
    for (const auto& r : results) {
        out << r.strategy.label() << ',' << money(r.initial) << ','
            << money(r.final_value()) << '\n';
    }
}

void write_fees_csv(const std::vector<BacktestResult>& results,
                    const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "strategy,admin_nominal,spread_nominal,total_nominal,"
           "admin_deflated,spread_deflated,total_deflated\n";
    for (const auto& r : results) {
        const auto& f = r.fee_totals;
        out << r.strategy.label() << ',' << money(f.admin_nominal) << ','
            << money(f.spread_nominal) << ','
            << money(f.admin_nominal + f.spread_nominal) << ','
            << money(f.admin_deflated) << ',' << money(f.spread_deflated) << ','
            << money(f.admin_deflated + f.spread_deflated) << '\n';
    }
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

double cents(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

std::string render_cumulative_svg(const std::vector<BacktestResult>& results,
                                  bool log_scale) {
    if (results.empty()) {
        throw std::invalid_argument("render_cumulative_svg: no results");
    }
    for (const auto& r : results) {
        if (r.daily_values.empty()) {
            throw std::invalid_argument("render_cumulative_svg: empty series for " +
                                        r.strategy.label());
        }
    }

    const double width = 900.0, height = 520.0;
    const double left = 80.0, right = 30.0, top = 20.0, bottom = 50.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    Date d_min = results.front().daily_values.front().first;
    Date d_max = d_min;
    double v_min = cents(results.front().daily_values.front().second);
    double v_max = v_min;
    for (const auto& r : results) {
        for (const auto& [date, value] : r.daily_values) {
            const double v = cents(value);
            d_min = std::min(d_min, date);
            d_max = std::max(d_max, date);
            v_min = std::min(v_min, v);
            v_max = std::max(v_max, v);
        }
    }
    const double day_span = std::max(1, d_max.days_since(d_min));

    const auto y_of = [&](double value) {
        double lo = v_min, hi = v_max, v = value;
        if (log_scale) {
            lo = std::log10(v_min);
            hi = std::log10(v_max);
            v = std::log10(value);
        }
        if (hi - lo < 1e-12) {  // flat series: center it
            lo -= 0.5;
            hi += 0.5;
        }
        return top + plot_h * (1.0 - (v - lo) / (hi - lo));
    };
    const auto x_of = [&](Date d) {
        return left + plot_w * (d.days_since(d_min) / day_span);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " +
           coord(width) + " " + coord(height) + "\">\n";
    svg += "<rect width=\"" + coord(width) + "\" height=\"" + coord(height) +
           "\" fill=\"white\"/>\n";

    // axes
    svg += "<line x1=\"" + coord(left) + "\" y1=\"" + coord(top) + "\" x2=\"" +
           coord(left) + "\" y2=\"" + coord(top + plot_h) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + coord(left) + "\" y1=\"" + coord(top + plot_h) +
           "\" x2=\"" + coord(left + plot_w) + "\" y2=\"" + coord(top + plot_h) +
           "\" stroke=\"black\"/>\n";

    // y ticks: decades on log scale, five even steps otherwise
    if (log_scale) {
        const int e_lo = static_cast<int>(std::ceil(std::log10(v_min) - 1e-9));
        const int e_hi = static_cast<int>(std::floor(std::log10(v_max) + 1e-9));
        for (int e = e_lo; e <= e_hi; ++e) {
            const double v = std::pow(10.0, e);
            const double y = y_of(v);
            svg += "<line x1=\"" + coord(left - 4) + "\" y1=\"" + coord(y) +
                   "\" x2=\"" + coord(left) + "\" y2=\"" + coord(y) +
                   "\" stroke=\"black\"/>\n";
            svg += "<text x=\"" + coord(left - 8) + "\" y=\"" + coord(y + 4) +
                   "\" text-anchor=\"end\" font-size=\"12\">1e" +
                   std::to_string(e) + "</text>\n";
        }
    } else {
        for (int i = 0; i <= 5; ++i) {
            const double v = v_min + (v_max - v_min) * i / 5.0;
            const double y = y_of(v);
            svg += "<line x1=\"" + coord(left - 4) + "\" y1=\"" + coord(y) +
                   "\" x2=\"" + coord(left) + "\" y2=\"" + coord(y) +
                   "\" stroke=\"black\"/>\n";
            svg += "<text x=\"" + coord(left - 8) + "\" y=\"" + coord(y + 4) +
                   "\" text-anchor=\"end\" font-size=\"12\">" + money(v) +
                   "</text>\n";
        }
    }

    // x ticks: at most six year marks
    const int y0 = d_min.year(), y1 = d_max.year();
    const int step = std::max(1, (y1 - y0) / 6 + ((y1 - y0) % 6 ? 1 : 0));
    for (int year = y0; year <= y1; year += step) {
        Date tick{year, 1, 1};
        if (tick < d_min) tick = d_min;
        const double x = x_of(tick);
        svg += "<line x1=\"" + coord(x) + "\" y1=\"" + coord(top + plot_h) +
               "\" x2=\"" + coord(x) + "\" y2=\"" + coord(top + plot_h + 4) +
               "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + coord(x) + "\" y=\"" + coord(top + plot_h + 18) +
               "\" text-anchor=\"middle\" font-size=\"12\">" +
               std::to_string(year) + "</text>\n";
    }

    const std::size_t n_colors = sizeof(kPalette) / sizeof(kPalette[0]);
    for (std::size_t s = 0; s < results.size(); ++s) {
        const auto& r = results[s];
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += kPalette[s % n_colors];
        svg += "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [date, value] : r.daily_values) {
            svg += coord(x_of(date));
            svg += ',';
            svg += coord(y_of(cents(value)));
            svg += ' ';
        }
        if (svg.back() == ' ') svg.pop_back();
        svg += "\"/>\n";

        // legend swatch + label
        const double ly = top + 16.0 + 18.0 * static_cast<double>(s);
        svg += "<line x1=\"" + coord(left + 10) + "\" y1=\"" + coord(ly) +
               "\" x2=\"" + coord(left + 34) + "\" y2=\"" + coord(ly) +
               "\" stroke=\"" + kPalette[s % n_colors] +
               "\" stroke-width=\"1.5\"/>\n";
        svg += "<text x=\"" + coord(left + 40) + "\" y=\"" + coord(ly + 4) +
               "\" font-size=\"12\">" + r.strategy.label() + "</text>\n";
    }

    svg += "</svg>\n";
    return svg;
}

void write_cumulative_svg(const std::vector<BacktestResult>& results,
                          const std::filesystem::path& path, bool log_scale) {
    auto out = open_out(path);
    out << render_cumulative_svg(results, log_scale);
}

}  // namespace bt
