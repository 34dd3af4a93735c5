#include "mevlab/bundle.hpp"

#include <algorithm>
#include <cmath>

namespace mevlab {

ExecutionTrace execute(const PoolConfig& config, const Bundle& bundle) {
  ExecutionTrace t;
  t.states.reserve(bundle.steps.size() + 1);
  t.results.reserve(bundle.steps.size());
  t.states.push_back(bundle.start);
  require_on_curve(config.curve_ref(), bundle.start);
  for (const SwapStep& step : bundle.steps) {
    StepResult r = apply_swap(config, t.states.back(), step);
    t.fees += r.fee;
    t.states.push_back(r.post);
    t.results.push_back(r);
  }
  return t;
}

double step_value(PoolState pre, PoolState post, double v) {
  return (pre.x - post.x) * v + (pre.y - post.y);
}

double conservation_residual(const Bundle& bundle, const ExecutionTrace& trace) {
  double trader_x = 0.0, trader_y = 0.0;
  double scale_x = bundle.start.x, scale_y = bundle.start.y;
  for (const SwapStep& s : bundle.steps) {
    if (s.direction == Direction::XtoY) {
      trader_x -= s.amount_in;
      trader_y += s.amount_out;
      scale_x += s.amount_in;
      scale_y += s.amount_out;
    } else {
      trader_y -= s.amount_in;
      trader_x += s.amount_out;
      scale_y += s.amount_in;
      scale_x += s.amount_out;
    }
  }
  PoolState end = trace.end();
  double rx = trader_x + (end.x - bundle.start.x) + trace.fees.x;
  double ry = trader_y + (end.y - bundle.start.y) + trace.fees.y;
  return std::max(std::fabs(rx) / scale_x, std::fabs(ry) / scale_y);
}

}  // namespace mevlab
