#pragma once

#include <optional>
#include <span>

#include "mevlab/bundle.hpp"
#include "mevlab/orders.hpp"

namespace mevlab {

// Maximal-extraction bundle for a single arbitrageur with belief v: walk the
// orders in input sequence, front-run each non-negative one to its limit
// state, then rebalance to the no-arbitrage state. Orders without a limit
// state are skipped.
Bundle optimal_bundle(const PoolConfig& config, PoolState s0, std::span<const SwapOrder> orders,
                      double v, ArbId arb = 0);

// Sum of arbitrageur step values at price v. When `arb` is set, only that
// arbitrageur's steps count.
double bundle_profit(const PoolConfig& config, const Bundle& bundle, double v,
                     std::optional<ArbId> arb = std::nullopt);

// Closed-form maximum: potential(s0) plus the value of every order.
double optimal_profit(const PoolConfig& config, PoolState s0, std::span<const SwapOrder> orders,
                      double v);

// Exhaustive search over order subsets, permutations and intermediate
// arbitrage targets drawn from a geometric price grid plus every exact limit
// state. At most four orders.
double brute_force_best_profit(const PoolConfig& config, PoolState s0,
                               std::span<const SwapOrder> orders, double v,
                               std::size_t grid_n = 64);

}  // namespace mevlab
