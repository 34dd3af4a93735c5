#pragma once

#include <string>

#include "mevlab/pool.hpp"

namespace mevlab {

// A user swap intent: spend up to delta_in of the input token for at least
// delta_out of the output token. Amounts are net of fees.
class SwapOrder {
 public:
  SwapOrder(Direction direction, double delta_in, double delta_out, std::string owner = {});

  Direction direction() const noexcept { return direction_; }
  double delta_in() const noexcept { return delta_in_; }
  double delta_out() const noexcept { return delta_out_; }
  const std::string& owner() const noexcept { return owner_; }

  // Worst acceptable price in numeraire per risky unit.
  double limit_price() const;

 private:
  Direction direction_;
  double delta_in_;
  double delta_out_;
  std::string owner_;
};

// Signed change to the pool reserves when the order fills at its limit state.
struct Impact {
  double dx = 0.0;
  double dy = 0.0;
};

Impact impact(const SwapOrder& order);

// State at which the order pays exactly delta_in and receives exactly
// delta_out. Throws NoLimitState when no positive-reserve state works.
PoolState limit_state(const TradingCurve& curve, const SwapOrder& order);

struct Execution {
  PoolState state;   // post-state, or the input state when unfilled
  double paid = 0.0;      // gross input
  double received = 0.0;  // curve-determined output
  FeeLedger fee;
  bool filled = false;
};

// Fill tolerance used when comparing received against delta_out.
double fill_slack(double delta_out);

// Executes the full input at the given state; unfilled if the output falls
// short of delta_out, in which case nothing moves.
Execution execute_at_state(const PoolConfig& config, PoolState state, const SwapOrder& order);

}  // namespace mevlab
