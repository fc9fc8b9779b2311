#include "bt/strategies.hpp"

#include <algorithm>
#include <stdexcept>

namespace bt {

StrategySpec StrategySpec::equ() { return {StrategyKind::Equ}; }

StrategySpec StrategySpec::mkc() { return {StrategyKind::Mkc}; }

StrategySpec StrategySpec::basket(BasketZone zone, Weighting weighting, int k) {
    StrategySpec spec;
    spec.kind = StrategyKind::Basket;
    spec.basket_zone = zone;
    spec.basket_weighting = weighting;
    spec.k = k;
    return spec;
}

StrategySpec StrategySpec::max_median(int k) {
    StrategySpec spec;
    spec.kind = StrategyKind::MaxMedian;
    spec.k = k;
    spec.rebalance = RebalancePeriod::Annual;
    return spec;
}

std::string StrategySpec::label() const {
    switch (kind) {
        case StrategyKind::Equ: return "equ";
        case StrategyKind::Mkc: return "mkc";
        case StrategyKind::Basket: {
            std::string zone = basket_zone == BasketZone::Top      ? "top"
                               : basket_zone == BasketZone::Middle ? "middle"
                                                                   : "bottom";
            std::string w = basket_weighting == Weighting::Equ ? "equ" : "mkc";
            return "basket_" + zone + "_" + w + "_k" + std::to_string(k);
        }
        case StrategyKind::MaxMedian: return "maxmedian_k" + std::to_string(k);
    }
    return "unknown";
}

double TargetWeights::total() const {
    double sum = 0.0;
    for (const auto& [id, w] : weights) sum += w;
    return sum;
}

namespace {

std::vector<std::size_t> constituents_or_throw(const MarketUniverse& u, Date d) {
    const auto day = u.calendar_index(d);
    if (!day) {
        throw Error(ErrorKind::DateNotInCalendar,
                    d.to_string() + " is not a trading date in this universe");
    }
    auto out = u.constituent_indices_at(*day);
    if (out.empty()) {
        throw Error(ErrorKind::EmptyConstituency,
                    "no constituents with data on " + d.to_string());
    }
    return out;
}

/// Median of the values in `v`, destructively. Even counts average the
/// two middle values.
double median_inplace(std::vector<double>& v) {
    const std::size_t n = v.size();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return (lower + upper) / 2.0;
}

}  // namespace

TargetWeights target_weights_equ(const MarketUniverse& u, Date d) {
    TargetWeights tw;
    for (const std::size_t sec : constituents_or_throw(u, d)) {
        tw.weights.emplace(u.securities()[sec], 1.0);
    }
    return tw;
}

TargetWeights target_weights_mkc(const MarketUniverse& u, Date d) {
    const auto day = u.calendar_index(d);
    TargetWeights tw;
    bool any_positive = false;
    for (const std::size_t sec : constituents_or_throw(u, d)) {
        const double cap = u.bar(sec, *day)->market_value();
        any_positive = any_positive || cap > 0.0;
        tw.weights.emplace(u.securities()[sec], cap);
    }
    if (!any_positive) {
        throw Error(ErrorKind::ZeroTotalWeight,
                    "all constituent market values are zero on " + d.to_string());
    }
    return tw;
}

std::vector<SecurityId> basket_select(const MarketUniverse& u, Date d,
                                      BasketZone zone, int k) {
    if (k < 1) throw std::invalid_argument("basket_select: k must be positive");
    const auto day = u.calendar_index(d);
    auto members = constituents_or_throw(u, d);
    const int n = static_cast<int>(members.size());
    if (n < 2 * k) {
        throw Error(ErrorKind::UniverseTooSmall,
                    "basket needs at least " + std::to_string(2 * k) +
                        " constituents, have " + std::to_string(n) + " on " +
                        d.to_string());
    }

    // rank 1 = largest market value; ties by id ascending
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) {
                  const double ca = u.bar(a, *day)->market_value();
                  const double cb = u.bar(b, *day)->market_value();
                  if (ca != cb) return ca > cb;
                  return u.securities()[a] < u.securities()[b];
              });

    int first_rank = 0;  // 1-based
    switch (zone) {
        case BasketZone::Top: first_rank = 1; break;
        case BasketZone::Bottom: first_rank = n - k + 1; break;
        case BasketZone::Middle: first_rank = n / 2 - k / 2 + 1; break;
    }
    if (first_rank < 1 || first_rank + k - 1 > n) {
        throw Error(ErrorKind::UniverseTooSmall,
                    "basket window [" + std::to_string(first_rank) + ", " +
                        std::to_string(first_rank + k - 1) +
                        "] does not fit in " + std::to_string(n) + " constituents");
    }

    std::vector<SecurityId> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int rank = first_rank; rank < first_rank + k; ++rank) {
        out.push_back(u.securities()[members[static_cast<std::size_t>(rank - 1)]]);
    }
    return out;
}

std::vector<MedianPick> maxmedian_ranking(const MarketUniverse& u,
                                          Date selection_date, int k) {
    if (k < 1) throw std::invalid_argument("maxmedian: k must be positive");
    const int year = selection_date.year();
    const auto first_day = u.first_trading_day_of_year(year);
    if (!first_day || *first_day != selection_date) {
        throw std::invalid_argument(
            "maxmedian: selection date must be the first trading day of a year");
    }

    const auto prior_days = u.days_in_year(year - 1);
    const std::size_t prior_count = prior_days.size();

    std::vector<MedianPick> candidates;
    if (prior_count > 0) {
        const std::size_t prior_start = *u.calendar_index(prior_days.front());
        std::vector<double> ratios;
        for (const std::size_t sec : constituents_or_throw(u, selection_date)) {
            std::size_t bars = 0;
            ratios.clear();
            for (std::size_t day = prior_start; day < prior_start + prior_count;
                 ++day) {
                const auto* bar = u.bar(sec, day);
                if (!bar) continue;
                ++bars;
                // ratio r = 1 + ret_capital; values exactly 1 are discarded
                if (bar->ret_capital != 0.0) {
                    ratios.push_back(1.0 + bar->ret_capital);
                }
            }
            // history requirement: bars on >= 90% of the prior year's days
            if (bars * 10 < prior_count * 9) continue;
            if (ratios.empty()) continue;
            candidates.push_back({u.securities()[sec], median_inplace(ratios)});
        }
    }

    if (candidates.size() < static_cast<std::size_t>(k)) {
        throw Error(ErrorKind::InsufficientEligibleSecurities,
                    "maxmedian needs " + std::to_string(k) +
                        " eligible securities, found " +
                        std::to_string(candidates.size()) + " for " +
                        std::to_string(year));
    }

    std::partial_sort(candidates.begin(),
                      candidates.begin() + static_cast<std::ptrdiff_t>(k),
                      candidates.end(),
                      [](const MedianPick& a, const MedianPick& b) {
                          if (a.median != b.median) return a.median > b.median;
                          return a.security < b.security;
                      });
    candidates.resize(static_cast<std::size_t>(k));
    return candidates;
}

std::vector<SecurityId> maxmedian_select(const MarketUniverse& u,
                                         Date selection_date, int k) {
    std::vector<SecurityId> out;
    for (auto& pick : maxmedian_ranking(u, selection_date, k)) {
        out.push_back(std::move(pick.security));
    }
    return out;
}

}  // namespace bt
