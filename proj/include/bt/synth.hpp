#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bt/index_engine.hpp"
#include "bt/market_data.hpp"

namespace bt {

/// Deterministic random source. mt19937_64 is bit-exact across platforms;
/// the distributions are hand-rolled because the standard library's are not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1), 53 bits of precision.
    double uniform01();

    double uniform(double lo, double hi);

    /// Box-Muller transform.
    double normal(double mean, double sd);

    /// Uniform integer in [lo, hi], both inclusive.
    int uniform_int(int lo, int hi);

private:
    std::mt19937_64 engine_;
};

/// Parameters for the synthetic market generator. Identical specs produce
/// bit-identical universes.
struct SynthSpec {
    std::uint64_t seed = 1;
    int n_securities = 10;
    int n_years = 2;
    int start_year = 2000;
    double volatility = 0.01;        // daily stdev of capital returns
    double dividend_yield = 0.02;    // annual rate, paid in quarterly lumps
    double split_probability = 0.0;  // 2:1 split chance per security-day
    double churn_rate = 0.0;         // share of securities with partial membership
    double flat_day_probability = 0.05;   // chance a day's ret_capital is exactly 0
    double missing_bar_probability = 0.0; // chance a bar is absent entirely
    // nonzero spread plants a distinct per-security daily drift, largest for
    // the first security, so cap orderings are predictable by construction
    double drift_spread = 0.0;
};

struct SynthData {
    MarketUniverse universe;
    CpiSeries cpi;
};

SynthData generate(const SynthSpec& spec);

/// Brute-force reference backtest: a plain day loop over position values
/// with its own fee arithmetic, sharing no code with index_engine. Every
/// daily value must agree with run_backtest to 1e-10 relative.
BacktestResult naive_backtest(const MarketUniverse& u, const CpiSeries& cpi,
                              const StrategySpec& spec,
                              const BacktestConfig& config);

/// Literal sort-based reference of the MaxMedian selection rule.
std::vector<SecurityId> naive_maxmedian(const MarketUniverse& u,
                                        Date selection_date, int k);

}  // namespace bt
