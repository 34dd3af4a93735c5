#include "mevlab/valuation.hpp"

#include <algorithm>

#include "mevlab/error.hpp"

namespace mevlab {

double potential(const TradingCurve& curve, PoolState s, double v) {
  require_on_curve(curve, s);
  PoolState star = state_at_price(curve, v);
  double gain = (s.x * v + s.y) - (star.x * v + star.y);
  // The no-arbitrage state minimises x*v + y, so anything below zero is rounding.
  return std::max(0.0, gain);
}

double tx_potential_value(const SwapOrder& order, double v) {
  Impact d = impact(order);
  return d.dx * v + d.dy;
}

double tx_value(const SwapOrder& order, double v) { return std::max(0.0, tx_potential_value(order, v)); }

double lvr(const PoolConfig& config, const Bundle& bundle, double v) {
  if (!(v > 0.0)) throw Error(ErrorCode::InvalidPrice, "price must be positive");
  ExecutionTrace t = execute(config, bundle);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < t.states.size(); ++i) {
    total += (t.states[i].x - t.states[i + 1].x) * v - (t.states[i + 1].y - t.states[i].y);
  }
  return total;
}

}  // namespace mevlab
