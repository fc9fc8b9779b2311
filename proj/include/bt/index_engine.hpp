#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bt/fees.hpp"
#include "bt/market_data.hpp"
#include "bt/strategies.hpp"

namespace bt {

/// Portfolio positions are tracked as USD values and evolved by total
/// returns; share counts exist only transiently at rebalance for fee
/// computation.
struct PortfolioState {
    Date as_of;
    std::map<SecurityId, double> positions;  // USD value, >= 0
    double cash = 0.0;

    double total_value() const;
};

struct FeeTotals {
    double admin_nominal = 0.0;
    double spread_nominal = 0.0;
    // same totals with each trade's fee deflated to the model's reference month
    double admin_deflated = 0.0;
    double spread_deflated = 0.0;
};

struct BacktestResult {
    StrategySpec strategy;
    double initial = 0.0;
    std::vector<std::pair<Date, double>> daily_values;
    std::vector<FeeLedgerEntry> trades;
    FeeTotals fee_totals;
    std::vector<std::string> warnings;
    // per rebalance-year picks, populated for MaxMedian only
    std::map<int, std::vector<MedianPick>> selections;

    double final_value() const;
};

/// Weighted average return: sum(w_i * r_i) / sum(w_i).
/// Every security with positive weight must appear in `returns`.
double index_return(const TargetWeights& weights,
                    const std::map<SecurityId, double>& returns);

/// Advance the portfolio one trading day: each position's value is
/// multiplied by (1 + ret_total) of its security on d. A position whose
/// security has no bar on d keeps its value and a warning is recorded.
PortfolioState evolve_day(const PortfolioState& p, const MarketUniverse& u,
                          Date d, std::vector<std::string>* warnings = nullptr);

/// Trade from the current positions to `targets` at day-d closes.
/// Fees are computed on the pre-scale share deltas, then every target
/// position is scaled by (V - fees)/V so cash returns to zero.
/// Held securities absent from `targets` are sold in full at their last
/// available close. Returns the post-trade state and the fee ledger rows.
std::pair<PortfolioState, std::vector<FeeLedgerEntry>> rebalance(
    const PortfolioState& p, const TargetWeights& targets,
    const MarketUniverse& u, Date d, const FeeModel& fm, const CpiSeries& cpi);

struct BacktestConfig {
    Date start;
    Date end;
    double initial = 100000.0;
    FeeModel fees;
};

/// Full simulation: rebalance at start's close, evolve daily, rebalance at
/// the close of the first trading day of each month (or year, for annual
/// strategies), and record the portfolio value at every close.
BacktestResult run_backtest(const MarketUniverse& u, const CpiSeries& cpi,
                            const StrategySpec& spec,
                            const BacktestConfig& config);

}  // namespace bt
