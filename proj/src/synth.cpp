#include "bt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace bt {

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double Rng::normal(double mean, double sd) {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * radius * std::cos(2.0 * std::numbers::pi * u2);
}

int Rng::uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
}

SynthData generate(const SynthSpec& spec) {
    if (spec.n_securities < 1) {
        throw std::invalid_argument("generate: need at least one security");
    }
    if (spec.n_years < 1) {
        throw std::invalid_argument("generate: need at least one year");
    }

    Rng rng(spec.seed);

    // trading calendar: every weekday of the covered years
    std::vector<Date> calendar;
    const Date last_day{spec.start_year + spec.n_years - 1, 12, 31};
    for (Date d{spec.start_year, 1, 1}; d <= last_day; d = d.next_day()) {
        if (!d.is_weekend()) calendar.push_back(d);
    }

    UniverseBuilder builder;
    for (int i = 0; i < spec.n_securities; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "SYN%04d", i + 1);
        const SecurityId id = buf;

        double price = 0.0;   // split-adjusted price path
        double shares0 = 0.0;
        if (spec.drift_spread > 0.0) {
            // plant a strict cap ordering: first security largest, and the
            // largest drift so the ordering can never flip
            price = 50.0 * std::pow(1.05, spec.n_securities - i);
            shares0 = 1e6;
        } else {
            price = rng.uniform(10.0, 200.0);
            shares0 = std::floor(rng.uniform(1e6, 5e7));
        }
        const double drift = spec.drift_spread * (spec.n_securities - i);

        double split_factor = 1.0;
        for (std::size_t t = 0; t < calendar.size(); ++t) {
            double rc = rng.normal(drift, spec.volatility);
            if (rc < -0.9) rc = -0.9;  // keep prices positive
            if (rng.uniform01() < spec.flat_day_probability) rc = 0.0;

            double dividend = 0.0;
            if (spec.dividend_yield > 0.0 && rng.uniform01() < 1.0 / 63.0) {
                dividend = spec.dividend_yield / 4.0;  // quarterly lumps
            }
            const bool split = rng.uniform01() < spec.split_probability;
            const bool missing =
                t > 0 && rng.uniform01() < spec.missing_bar_probability;

            if (t > 0) price *= 1.0 + rc;
            if (split) split_factor *= 2.0;
            if (missing) continue;

            PriceBar bar;
            bar.security = id;
            bar.date = calendar[t];
            bar.close = price / split_factor;
            bar.ret_total = rc + dividend;
            bar.ret_capital = rc;
            bar.shares_out = shares0 * split_factor;
            builder.add_bar(bar);
        }

        // churned securities join late or leave early
        if (rng.uniform01() < spec.churn_rate && calendar.size() > 4) {
            const int last = static_cast<int>(calendar.size()) - 1;
            const int cut = rng.uniform_int(last / 4, (3 * last) / 4);
            if (rng.uniform01() < 0.5) {
                builder.add_constituency(id, calendar[static_cast<std::size_t>(cut)],
                                         std::nullopt);
            } else {
                builder.add_constituency(id, calendar.front(),
                                         calendar[static_cast<std::size_t>(cut)]);
            }
        }
    }

    SynthData data;
    data.universe = builder.build();

    const YearMonth ref = FeeModel{}.reference_month;
    YearMonth lo{spec.start_year, 1};
    YearMonth hi{spec.start_year + spec.n_years - 1, 12};
    if (ref < lo) lo = ref;
    if (hi < ref) hi = ref;
    double level = 10.0;
    for (YearMonth m = lo; m <= hi; m = m.next()) {
        data.cpi.set(m, level);
        level *= 1.0 + rng.uniform(0.0005, 0.004);
    }
    data.cpi.validate();
    return data;
}

namespace {

/// Sort-everything restatement of the MaxMedian rule, shared by the two
/// oracle entry points. Mirrors the engine's error surface exactly.
std::vector<MedianPick> naive_maxmedian_ranking(const MarketUniverse& u,
                                                Date selection_date, int k) {
    if (k < 1) throw std::invalid_argument("maxmedian: k must be positive");

    const int year = selection_date.year();
    std::optional<Date> first;
    std::vector<Date> prior;
    for (const Date d : u.calendar()) {
        if (d.year() == year - 1) prior.push_back(d);
        if (d.year() == year && !first) first = d;
    }
    if (!first || *first != selection_date) {
        throw std::invalid_argument(
            "maxmedian: selection date must be the first trading day of a year");
    }

    std::vector<MedianPick> picks;
    if (!prior.empty()) {
        const auto members = u.constituents_at(selection_date);
        if (members.empty()) {
            throw Error(ErrorKind::EmptyConstituency,
                        "no constituents with data on " + selection_date.to_string());
        }
        for (const auto& id : members) {
            std::size_t bars = 0;
            std::vector<double> ratios;
            for (const Date d : prior) {
                const auto* bar = u.bar(id, d);
                if (!bar) continue;
                ++bars;
                if (bar->ret_capital != 0.0) ratios.push_back(1.0 + bar->ret_capital);
            }
            if (bars * 10 < prior.size() * 9) continue;
            if (ratios.empty()) continue;
            std::sort(ratios.begin(), ratios.end());
            const std::size_t n = ratios.size();
            const double median = n % 2 == 1
                                      ? ratios[n / 2]
                                      : (ratios[n / 2 - 1] + ratios[n / 2]) / 2.0;
            picks.push_back({id, median});
        }
    }

    if (picks.size() < static_cast<std::size_t>(k)) {
        throw Error(ErrorKind::InsufficientEligibleSecurities,
                    "maxmedian needs " + std::to_string(k) +
                        " eligible securities, found " +
                        std::to_string(picks.size()) + " for " +
                        std::to_string(year));
    }
    std::sort(picks.begin(), picks.end(),
              [](const MedianPick& a, const MedianPick& b) {
                  if (a.median != b.median) return a.median > b.median;
                  return a.security < b.security;
              });
    picks.resize(static_cast<std::size_t>(k));
    return picks;
}

}  // namespace

BacktestResult naive_backtest(const MarketUniverse& u, const CpiSeries& cpi,
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

    std::map<SecurityId, double> held;
    double cash = config.initial;

    const auto total = [&]() {
        double v = cash;
        for (const auto& [id, value] : held) v += value;
        return v;
    };

    const auto weights_on = [&](Date d) {
        std::map<SecurityId, double> w;
        if (spec.kind == StrategyKind::MaxMedian) {
            auto picks = naive_maxmedian_ranking(u, d, spec.k);
            for (const auto& pick : picks) w[pick.security] = 1.0;
            result.selections[d.year()] = std::move(picks);
            return w;
        }
        const auto members = u.constituents_at(d);
        if (members.empty()) {
            throw Error(ErrorKind::EmptyConstituency,
                        "no constituents with data on " + d.to_string());
        }
        if (spec.kind == StrategyKind::Basket) {
            const int n = static_cast<int>(members.size());
            if (n < 2 * spec.k) {
                throw Error(ErrorKind::UniverseTooSmall,
                            "basket needs at least " + std::to_string(2 * spec.k) +
                                " constituents, have " + std::to_string(n));
            }
            std::vector<std::pair<double, SecurityId>> caps;
            for (const auto& id : members) {
                caps.emplace_back(u.bar(id, d)->market_value(), id);
            }
            std::sort(caps.begin(), caps.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            int first = 0;  // 0-based rank of the first basket member
            if (spec.basket_zone == BasketZone::Bottom) first = n - spec.k;
            if (spec.basket_zone == BasketZone::Middle) first = n / 2 - spec.k / 2;
            for (int j = first; j < first + spec.k; ++j) {
                const auto& [cap, id] = caps[static_cast<std::size_t>(j)];
                w[id] = spec.basket_weighting == Weighting::Equ ? 1.0 : cap;
            }
            return w;
        }
        for (const auto& id : members) {
            w[id] = spec.kind == StrategyKind::Equ
                        ? 1.0
                        : u.bar(id, d)->market_value();
        }
        return w;
    };

    // fee arithmetic restated from scratch: a fixed administrative charge
    // expressed in reference-month dollars plus half the bid-ask spread
    const auto fee_parts = [&](double abs_shares, double price, Date d) {
        std::pair<double, double> parts{0.0, 0.0};
        if (abs_shares == 0.0) return parts;
        if (config.fees.admin_fee_ref != 0.0) {
            parts.first = config.fees.admin_fee_ref * cpi.at(YearMonth::of(d)) /
                          cpi.at(config.fees.reference_month);
        }
        parts.second = abs_shares * price * config.fees.spread_fraction / 2.0;
        return parts;
    };

    const auto close_on_or_before = [&](const SecurityId& id, Date d) {
        const auto sec = u.security_index(id);
        double price = 0.0;
        bool found = false;
        if (sec) {
            for (const auto& bar : u.bars_of(*sec)) {
                if (bar.date > d) break;
                price = bar.close;
                found = true;
            }
        }
        if (!found) {
            throw Error(ErrorKind::MissingBar,
                        "cannot price " + id + " to sell it on " + d.to_string());
        }
        return price;
    };

    const auto rebalance_held = [&](Date d) {
        const auto weights = weights_on(d);
        double wsum = 0.0;
        for (const auto& [id, w] : weights) wsum += w;
        if (wsum <= 0.0) {
            throw Error(ErrorKind::ZeroTotalWeight,
                        "target weights sum to zero on " + d.to_string());
        }
        const double before = total();

        double fees = 0.0;
        std::vector<FeeLedgerEntry> day_trades;
        for (const auto& [id, value] : held) {
            if (weights.contains(id)) continue;
            const double price = close_on_or_before(id, d);
            if (std::fabs(value) <= 1e-9 * before) continue;
            const double shares = value / price;
            const auto [admin, spread] = fee_parts(std::fabs(shares), price, d);
            fees += admin + spread;
            day_trades.push_back({d, id, -shares, price, admin, spread});
        }

        std::map<SecurityId, double> next;
        for (const auto& [id, w] : weights) {
            const auto* bar = u.bar(id, d);
            if (!bar) {
                throw Error(ErrorKind::MissingBar,
                            "no bar for target security " + id + " on " + d.to_string());
            }
            const double target = before * w / wsum;
            const auto it = held.find(id);
            const double delta = target - (it == held.end() ? 0.0 : it->second);
            if (std::fabs(delta) > 1e-9 * before) {
                const double shares = delta / bar->close;
                const auto [admin, spread] =
                    fee_parts(std::fabs(shares), bar->close, d);
                fees += admin + spread;
                day_trades.push_back({d, id, shares, bar->close, admin, spread});
            }
            if (target > 0.0) next[id] = target;
        }

        if (before - fees <= 0.0) {
            throw Error(ErrorKind::FeesExceedValue,
                        "fees " + std::to_string(fees) + " on " + d.to_string() +
                            " would wipe out portfolio value " +
                            std::to_string(before));
        }
        for (auto& [id, value] : next) value *= (before - fees) / before;
        held = std::move(next);
        cash = 0.0;

        std::sort(day_trades.begin(), day_trades.end(),
                  [](const FeeLedgerEntry& a, const FeeLedgerEntry& b) {
                      return a.security < b.security;
                  });
        result.trades.insert(result.trades.end(), day_trades.begin(),
                             day_trades.end());
    };

    const auto& calendar = u.calendar();
    rebalance_held(config.start);
    result.daily_values.emplace_back(config.start, total());
    for (std::size_t t = *start_day + 1; t <= *end_day; ++t) {
        const Date d = calendar[t];
        const Date prev = calendar[t - 1];
        for (auto& [id, value] : held) {
            const auto* bar = u.bar(id, d);
            if (bar) {
                value *= 1.0 + bar->ret_total;
            } else {
                result.warnings.push_back("no bar for " + id + " on " +
                                          d.to_string() + "; position value frozen");
            }
        }
        const bool boundary =
            spec.rebalance == RebalancePeriod::Annual
                ? d.year() != prev.year()
                : d.year() != prev.year() || d.month() != prev.month();
        if (boundary) rebalance_held(d);
        result.daily_values.emplace_back(d, total());
    }

    for (const auto& t : result.trades) {
        result.fee_totals.admin_nominal += t.admin_component;
        result.fee_totals.spread_nominal += t.spread_component;
        if (t.admin_component == 0.0 && t.spread_component == 0.0) continue;
        const double to_reference = cpi.at(config.fees.reference_month) /
                                    cpi.at(YearMonth::of(t.date));
        if (t.admin_component != 0.0) {
            result.fee_totals.admin_deflated += t.admin_component * to_reference;
        }
        if (t.spread_component != 0.0) {
            result.fee_totals.spread_deflated += t.spread_component * to_reference;
        }
    }
    return result;
}

std::vector<SecurityId> naive_maxmedian(const MarketUniverse& u,
                                        Date selection_date, int k) {
    std::vector<SecurityId> out;
    for (auto& pick : naive_maxmedian_ranking(u, selection_date, k)) {
        out.push_back(std::move(pick.security));
    }
    return out;
}

}  // namespace bt
