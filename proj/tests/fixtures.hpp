#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mevlab/mechanisms.hpp"
#include "mevlab/orders.hpp"
#include "mevlab/pool.hpp"

namespace fixtures {

using namespace mevlab;

// The three-order pool used throughout the worked examples.
inline PoolConfig example_pool() { return PoolConfig::constant_product(400.0); }
inline PoolState example_s0() { return {4.0, 100.0}; }

inline std::vector<SwapOrder> example_orders() {
  return {
      SwapOrder(Direction::XtoY, 8.0, 25.0, "u1"),
      SwapOrder(Direction::XtoY, 30.0, 12.0, "u2"),
      SwapOrder(Direction::YtoX, 20.0, 10.0, "u3"),
  };
}

inline SwapOrder sybil_order() { return SwapOrder(Direction::XtoY, 260.0, 271.0, "arb1-sybil"); }

inline SlotInput example_slot(std::vector<SwapOrder> orders = example_orders()) {
  SlotInput in;
  in.s0 = example_s0();
  in.orders = std::move(orders);
  in.reports = {{1, 4.0}, {2, 1.0}};
  in.seed = 7;
  return in;
}

inline bool close(double a, double b, double rel = 1e-9) {
  return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Constant product without the closed-form override, to exercise the
// generic bisection path.
class BisectedProduct final : public TradingCurve {
 public:
  explicit BisectedProduct(double k) : k_(k) {}
  double y_given_x(double x) const override { return k_ / x; }
  double x_given_y(double y) const override { return k_ / y; }
  double marginal_rate(PoolState s) const override { return s.y / s.x; }
  std::string name() const override { return "bisected_product"; }

 private:
  double k_;
};

// (x + a)(y + a) = k: finite reserves on both axes, so large orders can
// have no limit state.
class ShiftedProduct final : public TradingCurve {
 public:
  ShiftedProduct(double k, double a) : k_(k), a_(a) {}
  double y_given_x(double x) const override { return k_ / (x + a_) - a_; }
  double x_given_y(double y) const override { return k_ / (y + a_) - a_; }
  double marginal_rate(PoolState s) const override { return (s.y + a_) / (s.x + a_); }
  std::string name() const override { return "shifted_product"; }

 private:
  double k_;
  double a_;
};

}  // namespace fixtures
