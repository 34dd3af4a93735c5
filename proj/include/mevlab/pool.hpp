#pragma once

#include <memory>
#include <optional>
#include <string_view>

#include "mevlab/curve.hpp"

namespace mevlab {

using ArbId = int;

// X->Y sells the risky asset into the pool; Y->X buys it.
enum class Direction { XtoY, YtoX };

std::string_view to_string(Direction d);

enum class Role { User, Front, Back, Rebalance };

std::string_view to_string(Role r);

// Who inserted a step. User steps carry the order index; arbitrageur steps
// carry the arbitrageur and, for sandwich legs, the order they surround.
struct StepOrigin {
  Role role = Role::User;
  std::optional<std::size_t> order;
  ArbId arb = 0;

  static StepOrigin user(std::size_t order_index) { return {Role::User, order_index, 0}; }
  static StepOrigin front(ArbId a, std::optional<std::size_t> order_index) {
    return {Role::Front, order_index, a};
  }
  static StepOrigin back(ArbId a, std::optional<std::size_t> order_index) {
    return {Role::Back, order_index, a};
  }
  static StepOrigin rebalance(ArbId a) { return {Role::Rebalance, std::nullopt, a}; }

  bool is_user() const { return role == Role::User; }
};

// One swap inside a bundle. amount_in is the gross amount the trader hands
// over; for user steps under a positive fee only the net part reaches the pool.
struct SwapStep {
  Direction direction = Direction::XtoY;
  double amount_in = 0.0;
  double amount_out = 0.0;
  StepOrigin origin;
};

struct FeeLedger {
  double x = 0.0;
  double y = 0.0;

  FeeLedger& operator+=(const FeeLedger& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
};

struct PoolConfig {
  std::shared_ptr<const TradingCurve> curve;
  double fee = 0.0;

  static PoolConfig constant_product(double k, double fee = 0.0);

  const TradingCurve& curve_ref() const { return *curve; }
};

// Checks 0 <= fee < 1 and a non-null curve.
void validate(const PoolConfig& config);

// A pool as it evolves across slots: reserves plus fees kept outside them.
struct Pool {
  PoolState state;
  FeeLedger fees;
};

struct StepResult {
  PoolState post;
  FeeLedger fee;
  double pool_in = 0.0;  // net input that reached the reserves
};

StepResult apply_swap(const PoolConfig& config, PoolState pre, const SwapStep& step);

// Gross input a user must send so that `net` reaches the pool.
double gross_input(const PoolConfig& config, double net);

// Fee-free arbitrage step moving the pool from one state to another, or
// nullopt when the two states coincide to within 1e-12 relative.
std::optional<SwapStep> move_step(PoolState from, PoolState to, StepOrigin origin);

}  // namespace mevlab
