#include "bt/fees.hpp"

#include <stdexcept>

namespace bt {

TradeFee trade_fee(const FeeModel& model, double shares, double price,
                   YearMonth trade_month, const CpiSeries& cpi) {
    if (shares < 0.0) {
        throw std::invalid_argument("trade_fee: shares must be non-negative");
    }
    if (price <= 0.0) {
        throw std::invalid_argument("trade_fee: price must be positive");
    }
    if (shares == 0.0) return {0.0, 0.0};

    TradeFee fee;
    fee.admin = model.admin_fee_ref == 0.0
                    ? 0.0
                    : deflate(model.admin_fee_ref, model.reference_month,
                              trade_month, cpi);
    fee.spread = shares * price * model.spread_fraction / 2.0;
    return fee;
}

}  // namespace bt
