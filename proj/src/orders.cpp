#include "mevlab/orders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mevlab/error.hpp"
#include "solve.hpp"

namespace mevlab {

SwapOrder::SwapOrder(Direction direction, double delta_in, double delta_out, std::string owner)
    : direction_(direction), delta_in_(delta_in), delta_out_(delta_out), owner_(std::move(owner)) {
  if (!(delta_in > 0.0) || !(delta_out > 0.0) || !std::isfinite(delta_in) ||
      !std::isfinite(delta_out)) {
    throw Error(ErrorCode::InvalidOrder, "order amounts must be positive and finite");
  }
  double p = limit_price();
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw Error(ErrorCode::InvalidOrder, "order implies a degenerate price");
  }
}

double SwapOrder::limit_price() const {
  return direction_ == Direction::XtoY ? delta_out_ / delta_in_ : delta_in_ / delta_out_;
}

Impact impact(const SwapOrder& order) {
  if (order.direction() == Direction::XtoY) return {order.delta_in(), -order.delta_out()};
  return {-order.delta_out(), order.delta_in()};
}

PoolState limit_state(const TradingCurve& curve, const SwapOrder& order) {
  const double din = order.delta_in();
  const double dout = order.delta_out();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  auto valid = [](double v) { return v > 0.0 && std::isfinite(v); };

  PoolState s;
  if (order.direction() == Direction::XtoY) {
    // Output obtained when selling din starting from x, minus what is needed.
    auto g = [&](double x) {
      double y0 = curve.y_given_x(x);
      double y1 = curve.y_given_x(x + din);
      if (!valid(y0) || !valid(y1)) return nan;
      return (y0 - y1) - dout;
    };
    auto root = detail::bisect_decreasing(g, din);
    if (!root) throw Error(ErrorCode::NoLimitState, "no limit state for X->Y order");
    s = {*root, curve.y_given_x(*root)};
  } else {
    auto g = [&](double y) {
      double x0 = curve.x_given_y(y);
      double x1 = curve.x_given_y(y + din);
      if (!valid(x0) || !valid(x1)) return nan;
      return (x0 - x1) - dout;
    };
    auto root = detail::bisect_decreasing(g, din);
    if (!root) throw Error(ErrorCode::NoLimitState, "no limit state for Y->X order");
    s = {curve.x_given_y(*root), *root};
  }

  if (!valid(s.x) || !valid(s.y)) throw Error(ErrorCode::NoLimitState, "limit state has no reserves");
  double got = order.direction() == Direction::XtoY ? s.y - curve.y_given_x(s.x + din)
                                                    : s.x - curve.x_given_y(s.y + din);
  if (!(std::fabs(got - dout) <= fill_slack(dout))) {
    throw Error(ErrorCode::NoLimitState, "order cannot be filled on this curve");
  }
  return s;
}

double fill_slack(double delta_out) { return 1e-9 * std::max(1.0, delta_out); }

Execution execute_at_state(const PoolConfig& config, PoolState state, const SwapOrder& order) {
  const TradingCurve& curve = config.curve_ref();
  require_on_curve(curve, state);
  Execution e;
  e.state = state;
  e.paid = gross_input(config, order.delta_in());
  const double net = order.delta_in();
  PoolState post;
  if (order.direction() == Direction::XtoY) {
    post.x = state.x + net;
    post.y = curve.y_given_x(post.x);
    e.received = state.y - post.y;
  } else {
    post.y = state.y + net;
    post.x = curve.x_given_y(post.y);
    e.received = state.x - post.x;
  }
  if (!(post.x > 0.0) || !(post.y > 0.0) || !(e.received >= order.delta_out() - fill_slack(order.delta_out()))) {
    e.received = 0.0;
    e.paid = 0.0;
    return e;
  }
  double fee = e.paid - net;
  (order.direction() == Direction::XtoY ? e.fee.x : e.fee.y) = fee;
  e.state = post;
  e.filled = true;
  return e;
}

}  // namespace mevlab
