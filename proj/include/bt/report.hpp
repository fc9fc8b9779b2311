#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bt/analytics.hpp"
#include "bt/index_engine.hpp"

namespace bt {

/// All writers produce byte-identical output for identical inputs: no
/// timestamps, fixed formatting, deterministic ordering.

void write_values_csv(const BacktestResult& r, const std::filesystem::path& path);

void write_trades_csv(const BacktestResult& r, const std::filesystem::path& path);

/// One row per calendar year plus a footer block with the four summary
/// statistics. Pass a null `stats` to omit the footer (series too short
/// to summarize).
void write_annual_csv(const std::map<int, double>& per_year,
                      const AnnualStats* stats,
                      const std::filesystem::path& path);

/// MaxMedian picks per rebalance year, ranked by median ratio.
void write_selections_csv(const BacktestResult& r,
                          const std::filesystem::path& path);

/// Cross-strategy comparison of outcomes.
void write_final_values_csv(const std::vector<BacktestResult>& results,
                            const std::filesystem::path& path);

/// Fee totals per strategy, nominal and deflated to the reference month.
void write_fees_csv(const std::vector<BacktestResult>& results,
                    const std::filesystem::path& path);

/// Overlay chart of cumulative values, one polyline per strategy plus a
/// legend. Polyline points use the cent-rounded values the CSVs carry.
std::string render_cumulative_svg(const std::vector<BacktestResult>& results,
                                  bool log_scale = true);

void write_cumulative_svg(const std::vector<BacktestResult>& results,
                          const std::filesystem::path& path,
                          bool log_scale = true);

}  // namespace bt
