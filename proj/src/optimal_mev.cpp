#include "mevlab/optimal_mev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mevlab/error.hpp"
#include "mevlab/valuation.hpp"

namespace mevlab {

Bundle optimal_bundle(const PoolConfig& config, PoolState s0, std::span<const SwapOrder> orders,
                      double v, ArbId arb) {
  const TradingCurve& curve = config.curve_ref();
  require_on_curve(curve, s0);
  PoolState target = state_at_price(curve, v);

  Bundle b;
  b.start = s0;
  PoolState cur = s0;
  for (std::size_t j = 0; j < orders.size(); ++j) {
    const SwapOrder& o = orders[j];
    if (tx_potential_value(o, v) < 0.0) continue;
    PoolState ls;
    try {
      ls = limit_state(curve, o);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoLimitState) throw;
      continue;
    }
    if (auto step = move_step(cur, ls, StepOrigin::front(arb, j))) b.steps.push_back(*step);
    b.steps.push_back({o.direction(), gross_input(config, o.delta_in()), o.delta_out(), StepOrigin::user(j)});
    Impact d = impact(o);
    cur = {ls.x + d.dx, ls.y + d.dy};
    b.included_orders.push_back(j);
  }
  if (auto step = move_step(cur, target, StepOrigin::rebalance(arb))) b.steps.push_back(*step);
  return b;
}

double bundle_profit(const PoolConfig& config, const Bundle& bundle, double v, std::optional<ArbId> arb) {
  ExecutionTrace t = execute(config, bundle);
  double total = 0.0;
  for (std::size_t i = 0; i < bundle.steps.size(); ++i) {
    const StepOrigin& o = bundle.steps[i].origin;
    if (o.is_user() || (arb && o.arb != *arb)) continue;
    total += step_value(t.states[i], t.states[i + 1], v);
  }
  return total;
}

double optimal_profit(const PoolConfig& config, PoolState s0, std::span<const SwapOrder> orders, double v) {
  double total = potential(config.curve_ref(), s0, v);
  for (const SwapOrder& o : orders) {
    if (tx_potential_value(o, v) < 0.0) continue;
    try {
      limit_state(config.curve_ref(), o);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoLimitState) throw;
      continue;
    }
    total += tx_value(o, v);
  }
  return total;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Exact search over a fixed order sequence with arbitrage targets restricted
// to a candidate set. Moving between two states by fee-free swaps is worth
// W(from) - W(to) with W(s) = x*v + y, so only the target matters.
class SequenceSearch {
 public:
  SequenceSearch(const TradingCurve& curve, const std::vector<PoolState>& cands, double v,
                 const std::vector<const SwapOrder*>& seq)
      : curve_(curve), cands_(cands), v_(v), seq_(seq) {
    w_min_ = std::numeric_limits<double>::infinity();
    for (const PoolState& c : cands_) w_min_ = std::min(w_min_, wealth(c));
    best_move_.assign(seq_.size(), kNegInf);
    for (std::size_t i = seq_.size(); i-- > 0;) {
      double best = kNegInf;
      for (const PoolState& c : cands_) best = std::max(best, after_user(i, c) - wealth(c));
      best_move_[i] = best;
    }
  }

  double best_from(std::size_t i, PoolState s) const {
    if (i == seq_.size()) return wealth(s) - std::min(wealth(s), w_min_);
    return std::max(after_user(i, s), wealth(s) + best_move_[i]);
  }

 private:
  double wealth(PoolState s) const { return s.x * v_ + s.y; }

  // Continuation value when the i-th order executes at state c.
  double after_user(std::size_t i, PoolState c) const {
    const SwapOrder& o = *seq_[i];
    PoolState u;
    double received;
    if (o.direction() == Direction::XtoY) {
      u.x = c.x + o.delta_in();
      u.y = curve_.y_given_x(u.x);
      received = c.y - u.y;
    } else {
      u.y = c.y + o.delta_in();
      u.x = curve_.x_given_y(u.y);
      received = c.x - u.x;
    }
    if (!(u.x > 0.0) || !(u.y > 0.0) || !(received >= o.delta_out() - fill_slack(o.delta_out()))) {
      return kNegInf;
    }
    return best_from(i + 1, u);
  }

  const TradingCurve& curve_;
  const std::vector<PoolState>& cands_;
  double v_;
  const std::vector<const SwapOrder*>& seq_;
  double w_min_;
  std::vector<double> best_move_;
};

}  // namespace

double brute_force_best_profit(const PoolConfig& config, PoolState s0, std::span<const SwapOrder> orders,
                               double v, std::size_t grid_n) {
  if (orders.size() > 4) throw Error(ErrorCode::TooManyOrders, "brute force handles at most 4 orders");
  if (grid_n < 2) throw Error(ErrorCode::InvalidArgument, "grid_n must be at least 2");
  const TradingCurve& curve = config.curve_ref();
  const double p0 = spot_price(curve, s0);
  if (!(v > 0.0)) throw Error(ErrorCode::InvalidPrice, "price must be positive");

  std::vector<PoolState> cands;
  double lo = std::min(p0, v), hi = std::max(p0, v);
  for (const SwapOrder& o : orders) {
    lo = std::min(lo, o.limit_price());
    hi = std::max(hi, o.limit_price());
    try {
      PoolState ls = limit_state(curve, o);
      cands.push_back(ls);
      double p = curve.marginal_rate(ls);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoLimitState) throw;
    }
  }
  for (std::size_t g = 0; g < grid_n; ++g) {
    double p = lo * std::pow(hi / lo, static_cast<double>(g) / static_cast<double>(grid_n - 1));
    cands.push_back(state_at_price(curve, p));
  }
  cands.push_back(state_at_price(curve, v));
  cands.push_back(s0);

  double best = kNegInf;
  const std::size_t m = orders.size();
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < m; ++j)
      if (mask & (1u << j)) idx.push_back(j);
    do {
      std::vector<const SwapOrder*> seq;
      for (std::size_t j : idx) seq.push_back(&orders[j]);
      SequenceSearch search(curve, cands, v, seq);
      best = std::max(best, search.best_from(0, s0));
    } while (std::next_permutation(idx.begin(), idx.end()));
  }
  return best;
}

}  // namespace mevlab
