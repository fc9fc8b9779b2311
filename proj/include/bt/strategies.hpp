#pragma once

#include <map>
#include <string>
#include <vector>

#include "bt/date.hpp"
#include "bt/market_data.hpp"

namespace bt {

enum class StrategyKind { Equ, Mkc, Basket, MaxMedian };
enum class BasketZone { Top, Middle, Bottom };
enum class Weighting { Equ, Mkc };
enum class RebalancePeriod { Monthly, Annual };

/// Which selection/weighting rule drives rebalancing.
struct StrategySpec {
    StrategyKind kind = StrategyKind::Equ;
    BasketZone basket_zone = BasketZone::Top;       // Basket only
    Weighting basket_weighting = Weighting::Equ;    // Basket only
    int k = 20;                                     // Basket and MaxMedian
    RebalancePeriod rebalance = RebalancePeriod::Monthly;

    static StrategySpec equ();
    static StrategySpec mkc();
    static StrategySpec basket(BasketZone zone, Weighting weighting, int k = 20);
    static StrategySpec max_median(int k = 20);  // always annual

    /// Stable identifier used for output file names and table rows,
    /// e.g. "equ", "basket_middle_mkc_k20", "maxmedian_k20".
    std::string label() const;
};

/// Unnormalized non-negative portfolio weights, keyed by security.
struct TargetWeights {
    std::map<SecurityId, double> weights;

    double total() const;
};

/// Weight 1 for every constituent at `d`.
TargetWeights target_weights_equ(const MarketUniverse& u, Date d);

/// Weight close * shares_out for every constituent at `d`.
TargetWeights target_weights_mkc(const MarketUniverse& u, Date d);

/// The k constituents in the requested market-cap zone at `d`, in rank
/// order (largest cap first within the zone). Ranking is by market value
/// descending with ties broken by SecurityId ascending. With N
/// constituents, TOP takes ranks 1..k, BOTTOM ranks N-k+1..N, and MIDDLE
/// the k ranks centered at floor(N/2): floor(N/2)-k/2+1 .. onward.
std::vector<SecurityId> basket_select(const MarketUniverse& u, Date d,
                                      BasketZone zone, int k);

struct MedianPick {
    SecurityId security;
    double median = 0.0;
};

/// MaxMedian selection at the first trading day of a year: rank the
/// eligible constituents by the median of their prior-calendar-year
/// daily price ratios (1 + ret_capital, values exactly 1 discarded) and
/// keep the k largest, ties broken by SecurityId ascending. Eligibility
/// requires bars on at least 90% of the prior year's trading days and a
/// non-empty filtered ratio list.
std::vector<MedianPick> maxmedian_ranking(const MarketUniverse& u,
                                          Date selection_date, int k = 20);

/// Ids of maxmedian_ranking, in rank order.
std::vector<SecurityId> maxmedian_select(const MarketUniverse& u,
                                         Date selection_date, int k = 20);

}  // namespace bt
