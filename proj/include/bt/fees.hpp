#pragma once

#include "bt/date.hpp"
#include "bt/market_data.hpp"

namespace bt {

/// Transaction cost model: a flat administration fee quoted in
/// reference-month dollars (deflated to the trade month via CPI) plus a
/// bid-ask spread charge of which each side of a trade pays half.
struct FeeModel {
    double admin_fee_ref = 1.0;       // USD per executed trade, in reference-month dollars
    double spread_fraction = 0.001;   // full spread as a fraction of close
    YearMonth reference_month{2016, 12};

    static FeeModel zero() { return {0.0, 0.0, {2016, 12}}; }
};

/// One executed trade and the fees it incurred.
struct FeeLedgerEntry {
    Date date;
    SecurityId security;
    double shares_traded = 0.0;  // signed; fractional allowed
    double price = 0.0;          // execution close price
    double admin_component = 0.0;
    double spread_component = 0.0;

    double total_fee() const { return admin_component + spread_component; }
};

struct TradeFee {
    double admin = 0.0;
    double spread = 0.0;

    double total() const { return admin + spread; }
};

/// Fee for trading `shares` (absolute count) at `price` in `trade_month`.
/// Zero shares cost nothing; otherwise
///   admin  = admin_fee_ref converted from the reference month to the
///            trade month via CPI,
///   spread = shares * price * spread_fraction / 2.
TradeFee trade_fee(const FeeModel& model, double shares, double price,
                   YearMonth trade_month, const CpiSeries& cpi);

}  // namespace bt
