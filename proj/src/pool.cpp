#include "mevlab/pool.hpp"

#include <algorithm>
#include <cmath>

#include "mevlab/error.hpp"

namespace mevlab {

std::string_view to_string(Direction d) { return d == Direction::XtoY ? "XY" : "YX"; }

std::string_view to_string(Role r) {
  switch (r) {
    case Role::User: return "user";
    case Role::Front: return "front";
    case Role::Back: return "back";
    case Role::Rebalance: return "rebalance";
  }
  return "unknown";
}

PoolConfig PoolConfig::constant_product(double k, double fee) {
  PoolConfig c{std::make_shared<ConstantProduct>(k), fee};
  validate(c);
  return c;
}

void validate(const PoolConfig& config) {
  if (!config.curve) throw Error(ErrorCode::InvalidArgument, "pool config has no curve");
  if (!(config.fee >= 0.0 && config.fee < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "fee must lie in [0, 1)");
  }
}

double gross_input(const PoolConfig& config, double net) { return net / (1.0 - config.fee); }

StepResult apply_swap(const PoolConfig& config, PoolState pre, const SwapStep& step) {
  if (!(step.amount_in > 0.0) || !(step.amount_out > 0.0) || !std::isfinite(step.amount_in) ||
      !std::isfinite(step.amount_out)) {
    throw Error(ErrorCode::InvalidStep, "step amounts must be positive and finite");
  }
  const TradingCurve& curve = config.curve_ref();
  require_on_curve(curve, pre);

  StepResult r;
  double net = step.amount_in;
  if (step.origin.is_user() && config.fee > 0.0) {
    net = step.amount_in * (1.0 - config.fee);
    double fee = step.amount_in - net;
    (step.direction == Direction::XtoY ? r.fee.x : r.fee.y) = fee;
  }
  r.pool_in = net;
  if (step.direction == Direction::XtoY) {
    r.post = {pre.x + net, pre.y - step.amount_out};
  } else {
    r.post = {pre.x - step.amount_out, pre.y + net};
  }
  if (!(r.post.x > 0.0) || !(r.post.y > 0.0)) {
    throw Error(ErrorCode::NegativeReserve, "step would exhaust a reserve");
  }
  if (!curve.contains(r.post)) {
    throw Error(ErrorCode::CurveViolation, "step leaves the curve");
  }
  return r;
}

std::optional<SwapStep> move_step(PoolState from, PoolState to, StepOrigin origin) {
  double dx = to.x - from.x;
  if (std::fabs(dx) <= 1e-12 * std::max(from.x, to.x)) return std::nullopt;
  SwapStep s;
  s.origin = origin;
  if (dx > 0.0) {
    s.direction = Direction::XtoY;
    s.amount_in = dx;
    s.amount_out = from.y - to.y;
  } else {
    s.direction = Direction::YtoX;
    s.amount_in = to.y - from.y;
    s.amount_out = -dx;
  }
  return s;
}

}  // namespace mevlab
