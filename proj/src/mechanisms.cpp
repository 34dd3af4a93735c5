#include "mevlab/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "mevlab/error.hpp"
#include "mevlab/optimal_mev.hpp"
#include "mevlab/valuation.hpp"

namespace mevlab {

std::string_view to_string(MechanismKind k) { return k == MechanismKind::Strawman ? "strawman" : "rediswap"; }

MechanismKind parse_mechanism(std::string_view name) {
  if (name == "strawman") return MechanismKind::Strawman;
  if (name == "rediswap") return MechanismKind::Rediswap;
  throw Error(ErrorCode::InvalidArgument, "unknown mechanism '" + std::string(name) + "'");
}

double MechanismOutcome::payment_of(ArbId arb) const {
  for (const Payment& p : payments)
    if (p.arb == arb) return p.amount;
  throw Error(ErrorCode::UnknownArbitrageur, "arbitrageur " + std::to_string(arb) + " did not report");
}

namespace {

std::vector<ArbitrageurReport> sorted_reports(const SlotInput& input) {
  if (input.reports.empty()) throw Error(ErrorCode::NoReports, "no arbitrageur reports");
  std::vector<ArbitrageurReport> r = input.reports;
  std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.arb < b.arb; });
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i].q > 0.0) || !std::isfinite(r[i].q)) {
      throw Error(ErrorCode::InvalidPrice, "report of arbitrageur " + std::to_string(r[i].arb) + " is not positive");
    }
    if (i > 0 && r[i].arb == r[i - 1].arb) {
      throw Error(ErrorCode::InvalidArgument, "duplicate report for arbitrageur " + std::to_string(r[i].arb));
    }
  }
  return r;
}

std::vector<std::optional<PoolState>> limit_states(const TradingCurve& curve, std::span<const SwapOrder> orders) {
  std::vector<std::optional<PoolState>> out;
  out.reserve(orders.size());
  for (const SwapOrder& o : orders) {
    try {
      out.emplace_back(limit_state(curve, o));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoLimitState) throw;
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

// First index attaining the maximum, and the best value among the rest.
struct Ranking {
  std::size_t winner = 0;
  double best = 0.0;
  double second = 0.0;  // over the other bidders, floored at 0
  bool tie = false;
};

Ranking rank(const std::vector<double>& values, bool floor_second_at_zero) {
  Ranking r;
  r.best = values[0];
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > r.best) {
      r.best = values[i];
      r.winner = i;
    }
  }
  double second = floor_second_at_zero ? 0.0 : -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i == r.winner) continue;
    any = true;
    second = std::max(second, values[i]);
    if (values[i] == r.best) r.tie = true;
  }
  r.second = any ? std::max(0.0, second) : 0.0;
  return r;
}

void finish(const PoolConfig& config, MechanismOutcome& out) {
  out.trace = execute(config, out.bundle);
  out.fills.assign(out.orders.size(), OrderFill{});
  for (const SwapStep& s : out.bundle.steps) {
    if (!s.origin.is_user()) continue;
    OrderFill& f = out.fills.at(*s.origin.order);
    f.executed = true;
    f.paid = s.amount_in;
    f.received = s.amount_out;
  }
}

MechanismOutcome start_outcome(MechanismKind kind, const PoolConfig& config, const SlotInput& input) {
  validate(config);
  require_on_curve(config.curve_ref(), input.s0);
  MechanismOutcome out;
  out.mechanism = kind;
  out.reports = sorted_reports(input);
  out.orders = input.orders;
  out.refunds.assign(input.orders.size(), 0.0);
  for (const ArbitrageurReport& r : out.reports) out.payments.push_back({r.arb, 0.0});
  out.bundle.start = input.s0;
  return out;
}

}  // namespace

MechanismOutcome strawman_run(const PoolConfig& config, const SlotInput& input) {
  MechanismOutcome out = start_outcome(MechanismKind::Strawman, config, input);
  const TradingCurve& curve = config.curve_ref();
  const auto ls = limit_states(curve, input.orders);
  const std::size_t n = out.reports.size();

  std::vector<double> mev(n), rebalance_value(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q = out.reports[i].q;
    rebalance_value[i] = potential(curve, input.s0, q);
    mev[i] = rebalance_value[i];
    for (std::size_t j = 0; j < input.orders.size(); ++j)
      if (ls[j]) mev[i] += tx_value(input.orders[j], q);
  }

  const double top = *std::max_element(mev.begin(), mev.end());
  std::vector<std::size_t> tied;
  for (std::size_t i = 0; i < n; ++i)
    if (top - mev[i] <= 1e-12 * std::fabs(top)) tied.push_back(i);
  std::size_t w = tied.front();
  if (tied.size() > 1) {
    std::mt19937_64 rng(input.seed);
    std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
    w = tied[pick(rng)];
  }
  double price = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (i != w) price = std::max(price, mev[i]);

  const ArbId winner = out.reports[w].arb;
  const double qw = out.reports[w].q;
  out.bundle = optimal_bundle(config, input.s0, input.orders, qw, winner);
  out.payments[w].amount = price;
  if (mev[w] > 0.0) {
    for (std::size_t j : out.bundle.included_orders) out.refunds[j] = tx_value(input.orders[j], qw) / mev[w] * price;
    out.lp_refund = rebalance_value[w] / mev[w] * price;
  }

  ItemAudit a;
  a.kind = ItemKind::Everything;
  a.winner = winner;
  a.winning_value = mev[w];
  a.second_value = price;
  a.tie = tied.size() > 1;
  a.included = true;
  if (n == 1) a.note = "single bidder: no second price";
  if (a.tie) a.note = "tie among " + std::to_string(tied.size()) + " bidders broken by seeded draw";
  out.audit.push_back(a);

  finish(config, out);
  return out;
}

MechanismOutcome rediswap_run(const PoolConfig& config, const SlotInput& input) {
  MechanismOutcome out = start_outcome(MechanismKind::Rediswap, config, input);
  const TradingCurve& curve = config.curve_ref();
  const std::size_t n = out.reports.size();
  const PoolState s0 = input.s0;
  std::vector<double> values(n);

  for (std::size_t j = 0; j < input.orders.size(); ++j) {
    const SwapOrder& o = input.orders[j];
    ItemAudit a;
    a.kind = ItemKind::Order;
    a.order = j;
    std::optional<PoolState> ls;
    try {
      ls = limit_state(curve, o);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoLimitState) throw;
    }
    if (!ls) {
      a.note = "skipped: no limit state";
      out.audit.push_back(a);
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) values[i] = tx_potential_value(o, out.reports[i].q);
    Ranking r = rank(values, true);
    const ArbId w = out.reports[r.winner].arb;
    a.winner = w;
    a.winning_value = r.best;
    a.tie = r.tie;
    if (r.best < 0.0) {
      a.note = "not included: negative value for every bidder";
      out.audit.push_back(a);
      continue;
    }
    a.second_value = r.second;
    a.included = true;
    if (n == 1) a.note = "single bidder: no second price";

    if (auto s = move_step(s0, *ls, StepOrigin::front(w, j))) out.bundle.steps.push_back(*s);
    out.bundle.steps.push_back({o.direction(), gross_input(config, o.delta_in()), o.delta_out(), StepOrigin::user(j)});
    Impact d = impact(o);
    if (auto s = move_step({ls->x + d.dx, ls->y + d.dy}, s0, StepOrigin::back(w, j))) out.bundle.steps.push_back(*s);
    out.bundle.included_orders.push_back(j);

    out.payments[r.winner].amount += r.second;
    out.refunds[j] = r.second;
    out.audit.push_back(a);
  }

  for (std::size_t i = 0; i < n; ++i) values[i] = potential(curve, s0, out.reports[i].q);
  Ranking r = rank(values, true);
  const ArbId w = out.reports[r.winner].arb;
  ItemAudit a;
  a.kind = ItemKind::InitialState;
  a.winner = w;
  a.winning_value = r.best;
  a.second_value = r.second;
  a.tie = r.tie;
  a.included = true;
  if (n == 1) a.note = "single bidder: no second price";
  PoolState target = state_at_price(curve, out.reports[r.winner].q);
  if (auto s = move_step(s0, target, StepOrigin::rebalance(w))) out.bundle.steps.push_back(*s);
  out.payments[r.winner].amount += r.second;
  out.lp_refund = r.second;
  out.audit.push_back(a);

  finish(config, out);
  return out;
}

MechanismOutcome run_mechanism(MechanismKind kind, const PoolConfig& config, const SlotInput& input) {
  return kind == MechanismKind::Strawman ? strawman_run(config, input) : rediswap_run(config, input);
}

double user_utility(const MechanismOutcome& outcome, std::size_t order) {
  if (order >= outcome.orders.size()) {
    throw Error(ErrorCode::UnknownOrder, "order index " + std::to_string(order) + " out of range");
  }
  const SwapOrder& o = outcome.orders[order];
  const OrderFill& f = outcome.fills[order];
  double hold_x, hold_y, rate;
  if (o.direction() == Direction::XtoY) {
    rate = o.delta_out() / o.delta_in();
    hold_x = f.executed ? 0.0 : o.delta_in();
    hold_y = f.executed ? f.received : 0.0;
  } else {
    rate = o.delta_in() / o.delta_out();
    hold_x = f.executed ? f.received : 0.0;
    hold_y = f.executed ? 0.0 : o.delta_in();
  }
  return rate * hold_x + hold_y + outcome.refunds[order];
}

double arbitrageur_utility(const MechanismOutcome& outcome, ArbId arb, double true_belief,
                           std::span<const std::size_t> sybil_orders) {
  double u = -outcome.payment_of(arb);
  for (std::size_t j : sybil_orders) {
    if (j >= outcome.orders.size()) {
      throw Error(ErrorCode::UnknownOrder, "order index " + std::to_string(j) + " out of range");
    }
    const OrderFill& f = outcome.fills[j];
    if (f.executed) {
      u += outcome.orders[j].direction() == Direction::XtoY ? f.received - f.paid * true_belief
                                                           : f.received * true_belief - f.paid;
    }
    u += outcome.refunds[j];
  }
  const auto& steps = outcome.bundle.steps;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].origin.is_user() || steps[i].origin.arb != arb) continue;
    u += step_value(outcome.trace.states[i], outcome.trace.states[i + 1], true_belief);
  }
  return u;
}

double budget_residual(const MechanismOutcome& outcome) {
  double paid = 0.0, refunded = outcome.lp_refund;
  for (const Payment& p : outcome.payments) paid += p.amount;
  for (double r : outcome.refunds) refunded += r;
  return std::fabs(paid - refunded) / std::max(1.0, paid);
}

double conservation_residual(const MechanismOutcome& outcome) {
  return conservation_residual(outcome.bundle, outcome.trace);
}

SlotResult run_slot(const PoolConfig& config, PoolState s0, std::span<const TimedOrder> order_feed,
                    std::span<const TimedReport> report_feed, std::uint64_t cutoff, std::uint64_t seed) {
  SlotInput in;
  in.s0 = s0;
  in.seed = seed;
  std::vector<const TimedOrder*> arrived;
  for (const TimedOrder& o : order_feed)
    if (o.time < cutoff) arrived.push_back(&o);
  std::stable_sort(arrived.begin(), arrived.end(), [](auto* a, auto* b) { return a->time < b->time; });
  for (const TimedOrder* o : arrived) in.orders.push_back(o->order);
  for (const TimedReport& r : report_feed)
    if (r.time < cutoff) in.reports.push_back(r.report);
  SlotResult res{rediswap_run(config, in), {}, {}};
  res.post_state = res.outcome.final_state();
  res.fees = res.outcome.trace.fees;
  return res;
}

RoundEngine::RoundEngine(PoolConfig config, PoolState initial) : config_(std::move(config)), pool_{initial, {}} {
  validate(config_);
  require_on_curve(config_.curve_ref(), initial);
}

void RoundEngine::submit(TimedOrder order) { orders_.push_back(std::move(order)); }
void RoundEngine::submit(TimedReport report) { reports_.push_back(report); }

SlotResult RoundEngine::run_slot(std::uint64_t cutoff, std::uint64_t seed) {
  SlotResult res = mevlab::run_slot(config_, pool_.state, orders_, reports_, cutoff, seed);
  std::erase_if(orders_, [&](const TimedOrder& o) { return o.time < cutoff; });
  std::erase_if(reports_, [&](const TimedReport& r) { return r.time < cutoff; });
  pool_.state = res.post_state;
  pool_.fees += res.fees;
  res.fees = pool_.fees;
  return res;
}

}  // namespace mevlab
