#pragma once

#include "mevlab/bundle.hpp"
#include "mevlab/orders.hpp"

namespace mevlab {

// Profit from moving the pool from `s` to its no-arbitrage state at price v.
// Never negative.
double potential(const TradingCurve& curve, PoolState s, double v);

// Value at price v of the pool change an order causes at its limit state.
// May be negative.
double tx_potential_value(const SwapOrder& order, double v);

// max(0, tx_potential_value).
double tx_value(const SwapOrder& order, double v);

// Loss-versus-rebalancing of a bundle: sum over every step of what the pool
// gave up, valued at v. Telescopes to potential(start) - potential(end).
double lvr(const PoolConfig& config, const Bundle& bundle, double v);

}  // namespace mevlab
