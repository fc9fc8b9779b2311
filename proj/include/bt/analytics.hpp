#pragma once

#include <map>

#include "bt/index_engine.hpp"

namespace bt {

struct AnnualStats {
    std::map<int, double> per_year;  // calendar year -> return in percent
    double arithmetic = 0.0;         // mean of annual percents
    double geometric = 0.0;          // compound annual rate in percent
    double sd = 0.0;                 // sample standard deviation (n - 1)
    double sharpe = 0.0;             // (arithmetic - risk_free) / sd * 100
    double risk_free = 1.75;         // percent
};

/// Calendar-year returns in percent. Each year's return compares the last
/// close of the year with the last close of the prior year; the first
/// year's base is the initial capital.
std::map<int, double> annual_returns(const BacktestResult& r);

double sharpe_ratio(double arithmetic_pct, double sd_pct, double risk_free_pct);

AnnualStats summarize(const std::map<int, double>& per_year,
                      double risk_free = 1.75);

}  // namespace bt
