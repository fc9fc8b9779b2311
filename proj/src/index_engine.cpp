#include "bt/index_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bt {

namespace {

// Relative delta below which a rebalance difference is floating-point
// noise, not a trade. Keeps no-op rebalances fee-free.
constexpr double kTradeEpsRel = 1e-9;

}  // namespace

double PortfolioState::total_value() const {
    double total = cash;
    for (const auto& [id, value] : positions) total += value;
    return total;
}

double BacktestResult::final_value() const {
    return daily_values.empty() ? initial : daily_values.back().second;
}

double index_return(const TargetWeights& weights,
                    const std::map<SecurityId, double>& returns) {
    if (weights.weights.empty()) {
        throw Error(ErrorKind::ZeroTotalWeight, "no weights given");
    }
    double weight_sum = 0.0;
    double weighted_sum = 0.0;
    for (const auto& [id, w] : weights.weights) {
        if (w < 0.0) {
            throw std::invalid_argument("index_return: negative weight for " + id);
        }
        if (w == 0.0) continue;
        const auto it = returns.find(id);
        if (it == returns.end()) {
            throw Error(ErrorKind::MissingReturn,
                        "no return for weighted security " + id);
        }
        weight_sum += w;
        weighted_sum += w * it->second;
    }
    if (weight_sum <= 0.0) {
        throw Error(ErrorKind::ZeroTotalWeight, "total weight is zero");
    }
    return weighted_sum / weight_sum;
}

PortfolioState evolve_day(const PortfolioState& p, const MarketUniverse& u,
                          Date d, std::vector<std::string>* warnings) {
    PortfolioState next;
    next.as_of = d;
    next.cash = p.cash;
    for (const auto& [id, value] : p.positions) {
        const auto* bar = u.bar(id, d);
        if (bar) {
            next.positions.emplace(id, value * (1.0 + bar->ret_total));
        } else {
            next.positions.emplace(id, value);
            if (warnings) {
                warnings->push_back("no bar for " + id + " on " + d.to_string() +
                                    "; position value frozen");
            }
        }
    }
    return next;
}

std::pair<PortfolioState, std::vector<FeeLedgerEntry>> rebalance(
    const PortfolioState& p, const TargetWeights& targets,
    const MarketUniverse& u, Date d, const FeeModel& fm, const CpiSeries& cpi) {
    const auto day = u.calendar_index(d);
    if (!day) {
        throw Error(ErrorKind::DateNotInCalendar,
                    d.to_string() + " is not a trading date in this universe");
    }
    const double weight_sum = targets.total();
    if (weight_sum <= 0.0) {
        throw Error(ErrorKind::ZeroTotalWeight,
                    "target weights sum to zero on " + d.to_string());
    }

    const double value_before = p.total_value();
    const double trade_eps = kTradeEpsRel * value_before;
    const YearMonth month = YearMonth::of(d);

    std::vector<FeeLedgerEntry> entries;
    double fees = 0.0;

    const auto record_trade = [&](const SecurityId& id, double delta_value,
                                  double price) {
        if (std::abs(delta_value) <= trade_eps) return;
        const double shares_delta = delta_value / price;
        const TradeFee fee = trade_fee(fm, std::abs(shares_delta), price, month, cpi);
        fees += fee.total();
        entries.push_back({d, id, shares_delta, price, fee.admin, fee.spread});
    };

    // positions with no target are sold in full at the last available close
    for (const auto& [id, value] : p.positions) {
        if (targets.weights.contains(id)) continue;
        const auto sec = u.security_index(id);
        const auto* last = sec ? u.last_bar_on_or_before(*sec, *day) : nullptr;
        if (!last) {
            throw Error(ErrorKind::MissingBar,
                        "cannot price " + id + " to sell it on " + d.to_string());
        }
        record_trade(id, -value, last->close);
    }

    PortfolioState next;
    next.as_of = d;
    next.cash = 0.0;
    for (const auto& [id, w] : targets.weights) {
        const auto* bar = u.bar(id, d);
        if (!bar) {
            throw Error(ErrorKind::MissingBar,
                        "no bar for target security " + id + " on " + d.to_string());
        }
        const double target_value = value_before * (w / weight_sum);
        const auto held = p.positions.find(id);
        const double current = held == p.positions.end() ? 0.0 : held->second;
        record_trade(id, target_value - current, bar->close);
        if (target_value > 0.0) next.positions.emplace(id, target_value);
    }

    if (value_before - fees <= 0.0) {
        throw Error(ErrorKind::FeesExceedValue,
                    "fees " + std::to_string(fees) + " on " + d.to_string() +
                        " would wipe out portfolio value " +
                        std::to_string(value_before));
    }

    // fees come out of the portfolio total: scale so cash stays zero
    const double scale = (value_before - fees) / value_before;
    for (auto& [id, value] : next.positions) value *= scale;

    std::sort(entries.begin(), entries.end(),
              [](const FeeLedgerEntry& a, const FeeLedgerEntry& b) {
                  return a.security < b.security;
              });
    return {std::move(next), std::move(entries)};
}

namespace {

TargetWeights targets_for(const MarketUniverse& u, const StrategySpec& spec,
                          Date d, BacktestResult* result) {
    switch (spec.kind) {
        case StrategyKind::Equ:
            return target_weights_equ(u, d);
        case StrategyKind::Mkc:
            return target_weights_mkc(u, d);
        case StrategyKind::Basket: {
            TargetWeights tw;
            bool any_positive = false;
            for (const auto& id : basket_select(u, d, spec.basket_zone, spec.k)) {
                double w = 1.0;
                if (spec.basket_weighting == Weighting::Mkc) {
                    w = u.bar(id, d)->market_value();
                    any_positive = any_positive || w > 0.0;
                }
                tw.weights.emplace(id, w);
            }
            if (spec.basket_weighting == Weighting::Mkc && !any_positive) {
                throw Error(ErrorKind::ZeroTotalWeight,
                            "all basket market values are zero on " + d.to_string());
            }
            return tw;
        }
        case StrategyKind::MaxMedian: {
            auto picks = maxmedian_ranking(u, d, spec.k);
            TargetWeights tw;
            for (const auto& pick : picks) tw.weights.emplace(pick.security, 1.0);
            if (result) result->selections.emplace(d.year(), std::move(picks));
            return tw;
        }
    }
    throw std::logic_error("unknown strategy kind");
}

}  // namespace

BacktestResult run_backtest(const MarketUniverse& u, const CpiSeries& cpi,
                            const StrategySpec& spec,
                            const BacktestConfig& config) {
    if (config.initial <= 0.0) {
        throw std::invalid_argument("initial capital must be positive");
    }
    if (config.end < config.start) {
        throw std::invalid_argument("backtest end precedes start");
    }
    const auto start_day = u.calendar_index(config.start);
    if (!start_day) {
        throw Error(ErrorKind::DateNotInCalendar,
                    "start " + config.start.to_string() + " is not a trading date");
    }
    const auto end_day = u.calendar_index(config.end);
    if (!end_day) {
        throw Error(ErrorKind::DateNotInCalendar,
                    "end " + config.end.to_string() + " is not a trading date");
    }

    BacktestResult result;
    result.strategy = spec;
    result.initial = config.initial;

    PortfolioState state;
    state.as_of = config.start;
    state.cash = config.initial;

    const auto& calendar = u.calendar();

    const auto rebalance_into = [&](Date d) {
        const TargetWeights targets = targets_for(u, spec, d, &result);
        auto [next, entries] = rebalance(state, targets, u, d, config.fees, cpi);
        state = std::move(next);
        result.trades.insert(result.trades.end(),
                             std::make_move_iterator(entries.begin()),
                             std::make_move_iterator(entries.end()));
    };

    try {
        rebalance_into(config.start);
        result.daily_values.emplace_back(config.start, state.total_value());
        for (std::size_t day = *start_day + 1; day <= *end_day; ++day) {
            const Date d = calendar[day];
            const Date prev = calendar[day - 1];
            state = evolve_day(state, u, d, &result.warnings);
            const bool boundary = spec.rebalance == RebalancePeriod::Annual
                                      ? d.year() != prev.year()
                                      : YearMonth::of(d) != YearMonth::of(prev);
            if (boundary) rebalance_into(d);
            result.daily_values.emplace_back(d, state.total_value());
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::FeesExceedValue) throw;
        std::string inner = e.what();
        const std::string prefix = std::string(to_string(e.kind())) + ": ";
        if (inner.rfind(prefix, 0) == 0) inner = inner.substr(prefix.size());
        throw Error(ErrorKind::FeesExceedValue,
                    inner + "; backtest aborted after " +
                        std::to_string(result.daily_values.size()) +
                        " recorded closes (last value " +
                        std::to_string(state.total_value()) + " on " +
                        state.as_of.to_string() + ")");
    }

    for (const auto& t : result.trades) {
        const YearMonth m = YearMonth::of(t.date);
        result.fee_totals.admin_nominal += t.admin_component;
        result.fee_totals.spread_nominal += t.spread_component;
        if (t.admin_component != 0.0) {
            result.fee_totals.admin_deflated +=
                deflate(t.admin_component, m, config.fees.reference_month, cpi);
        }
        if (t.spread_component != 0.0) {
            result.fee_totals.spread_deflated +=
                deflate(t.spread_component, m, config.fees.reference_month, cpi);
        }
    }
    return result;
}

}  // namespace bt
