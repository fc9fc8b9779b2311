#include "bt/analytics.hpp"

#include <cmath>

namespace bt {

std::map<int, double> annual_returns(const BacktestResult& r) {
    if (r.daily_values.empty()) {
        throw Error(ErrorKind::SpanTooShort, "no daily values to annualize");
    }
    std::map<int, double> out;
    int year = r.daily_values.front().first.year();
    double base = r.initial;
    double last = base;  // most recent close within `year`
    for (const auto& [date, value] : r.daily_values) {
        if (date.year() != year) {
            out[year] = (last / base - 1.0) * 100.0;
            base = last;
            year = date.year();
        }
        last = value;
    }
    out[year] = (last / base - 1.0) * 100.0;
    return out;
}

double sharpe_ratio(double arithmetic_pct, double sd_pct, double risk_free_pct) {
    if (sd_pct <= 0.0) {
        throw Error(ErrorKind::DegenerateSeries,
                    "standard deviation must be positive for a Sharpe ratio");
    }
    return (arithmetic_pct - risk_free_pct) / sd_pct * 100.0;
}

AnnualStats summarize(const std::map<int, double>& per_year, double risk_free) {
    const std::size_t n = per_year.size();
    if (n < 2) {
        throw Error(ErrorKind::DegenerateSeries,
                    "need at least two annual returns, have " + std::to_string(n));
    }

    double sum = 0.0;
    double product = 1.0;
    for (const auto& [year, pct] : per_year) {
        if (pct <= -100.0) {
            throw Error(ErrorKind::InvalidInput,
                        "annual return for " + std::to_string(year) +
                            " is not above -100%");
        }
        sum += pct;
        product *= 1.0 + pct / 100.0;
    }
    const double mean = sum / static_cast<double>(n);

    double sq_dev = 0.0;
    for (const auto& [year, pct] : per_year) {
        sq_dev += (pct - mean) * (pct - mean);
    }
    const double sd = std::sqrt(sq_dev / static_cast<double>(n - 1));
    if (sd == 0.0) {
        throw Error(ErrorKind::DegenerateSeries,
                    "annual returns are constant; Sharpe ratio is undefined");
    }

    AnnualStats stats;
    stats.per_year = per_year;
    stats.arithmetic = mean;
    stats.geometric =
        (std::pow(product, 1.0 / static_cast<double>(n)) - 1.0) * 100.0;
    stats.sd = sd;
    stats.risk_free = risk_free;
    stats.sharpe = sharpe_ratio(mean, sd, risk_free);
    return stats;
}

}  // namespace bt
