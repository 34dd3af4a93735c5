#include <doctest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "mevlab/error.hpp"
#include "mevlab/optimal_mev.hpp"
#include "mevlab/valuation.hpp"

using namespace mevlab;
using fixtures::close;

TEST_CASE("strawman on the worked example") {
  PoolConfig cfg = fixtures::example_pool();
  MechanismOutcome out = strawman_run(cfg, fixtures::example_slot());
  REQUIRE(out.audit.size() == 1);
  CHECK(out.audit[0].winner == 1);
  CHECK(close(out.payment_of(1), 92.0));
  CHECK(out.payment_of(2) == 0.0);
  CHECK(close(out.refunds[0], 7.0 / 151.0 * 92.0));
  CHECK(close(out.refunds[1], 108.0 / 151.0 * 92.0));
  CHECK(out.refunds[2] == 0.0);
  CHECK(close(out.lp_refund, 36.0 / 151.0 * 92.0));
  CHECK(close(arbitrageur_utility(out, 1, 4.0), 59.0));
  CHECK(arbitrageur_utility(out, 2, 1.0) == 0.0);
  CHECK(close(user_utility(out, 0), 25.0 + 7.0 / 151.0 * 92.0));
  CHECK(close(user_utility(out, 1), 12.0 + 108.0 / 151.0 * 92.0));
  CHECK(close(user_utility(out, 2), 20.0));
  CHECK(budget_residual(out) <= 1e-9);
  CHECK_THROWS_AS(user_utility(out, 3), Error);
  CHECK_THROWS_AS(arbitrageur_utility(out, 9, 1.0), Error);
}

TEST_CASE("strawman with a Sybil order") {
  PoolConfig cfg = fixtures::example_pool();
  auto orders = fixtures::example_orders();
  orders.push_back(fixtures::sybil_order());
  MechanismOutcome out = strawman_run(cfg, fixtures::example_slot(orders));
  CHECK(out.audit[0].winner == 1);
  CHECK(close(out.audit[0].winning_value, 920.0));
  CHECK(close(out.refunds[3], 769.0 / 920.0 * 92.0));
  std::size_t sybil[] = {3};
  CHECK(close(arbitrageur_utility(out, 1, 4.0, sybil), 59.0 + 769.0 / 920.0 * 92.0));
  // The real users now get a smaller share of the same payment.
  CHECK(close(user_utility(out, 0), 25.0 + 7.0 / 920.0 * 92.0));
  CHECK(close(user_utility(out, 1), 12.0 + 108.0 / 920.0 * 92.0));
}

TEST_CASE("strawman with a single bidder pays nothing") {
  PoolConfig cfg = fixtures::example_pool();
  SlotInput in = fixtures::example_slot();
  in.reports = {{1, 4.0}};
  MechanismOutcome out = strawman_run(cfg, in);
  CHECK(out.payment_of(1) == 0.0);
  for (double r : out.refunds) CHECK(r == 0.0);
  CHECK(out.lp_refund == 0.0);
}

TEST_CASE("strawman ties are broken by the seed") {
  PoolConfig cfg = fixtures::example_pool();
  SlotInput in = fixtures::example_slot();
  in.reports = {{1, 4.0}, {2, 4.0}, {3, 4.0}};
  std::set<ArbId> winners;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    in.seed = seed;
    MechanismOutcome a = strawman_run(cfg, in);
    MechanismOutcome b = strawman_run(cfg, in);
    CHECK(a.audit[0].winner == b.audit[0].winner);
    CHECK(a.audit[0].tie);
    winners.insert(*a.audit[0].winner);
    CHECK(close(a.payment_of(*a.audit[0].winner), 151.0));
  }
  CHECK(winners.size() == 3);
}

TEST_CASE("rediswap on the worked example") {
  PoolConfig cfg = fixtures::example_pool();
  MechanismOutcome out = rediswap_run(cfg, fixtures::example_slot());
  CHECK(close(out.payment_of(1), 18.0));
  CHECK(close(out.payment_of(2), 36.0));
  CHECK(out.refunds[0] == 0.0);
  CHECK(close(out.refunds[1], 18.0));
  CHECK(out.refunds[2] == 0.0);
  CHECK(close(out.lp_refund, 36.0));
  REQUIRE(out.audit.size() == 4);
  CHECK(out.audit[0].winner == 1);
  CHECK(out.audit[1].winner == 1);
  CHECK(out.audit[2].winner == 2);
  CHECK(out.audit[3].kind == ItemKind::InitialState);
  CHECK(out.audit[3].winner == 2);
  // Three sandwiches back to s0, then the rebalance.
  REQUIRE(out.bundle.steps.size() == 10);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(out.bundle.steps[3 * j].origin.role == Role::Front);
    CHECK(out.bundle.steps[3 * j + 1].origin.role == Role::User);
    CHECK(out.bundle.steps[3 * j + 2].origin.role == Role::Back);
    CHECK(approx_equal(out.trace.states[3 * j + 3], {4, 100}));
  }
  CHECK(out.bundle.steps[9].origin.role == Role::Rebalance);
  CHECK(approx_equal(out.final_state(), {20, 20}));
  CHECK(close(user_utility(out, 1), 12.0 + 18.0));
  CHECK(budget_residual(out) <= 1e-9);
  CHECK(conservation_residual(out) <= 1e-9);
}

TEST_CASE("rediswap without orders") {
  PoolConfig cfg = fixtures::example_pool();
  SlotInput in = fixtures::example_slot({});
  MechanismOutcome out = rediswap_run(cfg, in);
  REQUIRE(out.bundle.steps.size() == 1);
  CHECK(approx_equal(out.final_state(), {20, 20}));
  CHECK(close(out.payment_of(2), 36.0));
  CHECK(close(out.lp_refund, 36.0));
}

TEST_CASE("rediswap single bidder and negative order") {
  PoolConfig cfg = fixtures::example_pool();
  SlotInput in = fixtures::example_slot({fixtures::example_orders()[2]});
  in.reports = {{1, 4.0}};
  MechanismOutcome out = rediswap_run(cfg, in);
  REQUIRE(out.bundle.steps.size() == 1);
  CHECK(out.bundle.steps[0].origin.role == Role::Rebalance);
  CHECK(out.payment_of(1) == 0.0);
  CHECK_FALSE(out.audit[0].included);
}

TEST_CASE("rediswap argmax ties go to the lowest id") {
  PoolConfig cfg = fixtures::example_pool();
  SlotInput in = fixtures::example_slot();
  in.reports = {{5, 4.0}, {3, 4.0}};
  MechanismOutcome out = rediswap_run(cfg, in);
  for (const ItemAudit& a : out.audit) {
    if (!a.included) continue;
    CHECK(a.winner == 3);
    CHECK(a.tie);
  }
}

TEST_CASE("no reports") {
  PoolConfig cfg = fixtures::example_pool();
  SlotInput in = fixtures::example_slot();
  in.reports.clear();
  try {
    rediswap_run(cfg, in);
    FAIL("expected NoReports");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoReports);
  }
  CHECK_THROWS_AS(strawman_run(cfg, in), Error);
}

TEST_CASE("rediswap invariants on random instances") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    double fee = trial % 3 == 0 ? 0.003 : 0.0;
    PoolConfig cfg = PoolConfig::constant_product(1e4, fee);
    double spot = 2.0 * std::exp(u(rng) - 0.5);
    SlotInput in;
    in.s0 = state_at_price(cfg.curve_ref(), spot);
    int m = static_cast<int>(u(rng) * 5);
    for (int j = 0; j < m; ++j) {
      double p = spot * std::exp(0.4 * (u(rng) - 0.5));
      double sz = in.s0.x * 0.1 * u(rng) + 1e-3;
      if (u(rng) < 0.5)
        in.orders.emplace_back(Direction::XtoY, sz, sz * p);
      else
        in.orders.emplace_back(Direction::YtoX, sz * p, sz);
    }
    int n = 1 + static_cast<int>(u(rng) * 4);
    for (int i = 0; i < n; ++i) in.reports.push_back({i, spot * std::exp(0.4 * (u(rng) - 0.5))});

    MechanismOutcome out = rediswap_run(cfg, in);
    CHECK(budget_residual(out) <= 1e-9);
    CHECK(conservation_residual(out) <= 1e-9);
    for (const Payment& p : out.payments) CHECK(p.amount >= 0.0);
    for (double r : out.refunds) CHECK(r >= 0.0);

    // Every sandwich returns to s0.
    for (std::size_t i = 0; i < out.bundle.steps.size(); ++i) {
      const SwapStep& s = out.bundle.steps[i];
      bool closes = s.origin.role == Role::Back ||
                    (s.origin.role == Role::User &&
                     (i + 1 == out.bundle.steps.size() || out.bundle.steps[i + 1].origin.role != Role::Back));
      if (closes) CHECK(approx_equal(out.trace.states[i + 1], in.s0));
    }

    // Extraction measured at the reports matches the per-item maxima.
    double expect = 0.0, best_rebalance = 0.0;
    for (const auto& r : in.reports) best_rebalance = std::max(best_rebalance, potential(cfg.curve_ref(), in.s0, r.q));
    expect += best_rebalance;
    for (const auto& o : in.orders) {
      double best = 0.0;
      for (const auto& r : in.reports) best = std::max(best, tx_value(o, r.q));
      expect += best;
    }
    double got = 0.0;
    for (std::size_t i = 0; i < out.bundle.steps.size(); ++i) {
      const SwapStep& s = out.bundle.steps[i];
      if (s.origin.is_user()) continue;
      double q = 0.0;
      for (const auto& r : out.reports)
        if (r.arb == s.origin.arb) q = r.q;
      got += step_value(out.trace.states[i], out.trace.states[i + 1], q);
    }
    CHECK(close(got, expect, 1e-9));

    // Winners never lose on an item under truthful reports.
    for (const ItemAudit& a : out.audit) {
      if (!a.included) continue;
      CHECK(a.second_value <= a.winning_value + 1e-12);
    }

    MechanismOutcome sm = strawman_run(cfg, in);
    CHECK(budget_residual(sm) <= 1e-9);
    CHECK(conservation_residual(sm) <= 1e-9);
  }
}

TEST_CASE("slot orders run in submission-time order") {
  PoolConfig cfg = fixtures::example_pool();
  auto tx = fixtures::example_orders();
  std::vector<TimedOrder> orders{{5, tx[0]}, {2, tx[1]}, {9, tx[2]}, {2, tx[2]}};
  std::vector<TimedReport> reports{{0, {1, 4.0}}, {1, {2, 1.0}}};
  SlotResult r = run_slot(cfg, {4, 100}, orders, reports, 9);
  REQUIRE(r.outcome.orders.size() == 3);
  CHECK(r.outcome.orders[0].owner() == "u2");
  CHECK(r.outcome.orders[1].owner() == "u3");
  CHECK(r.outcome.orders[2].owner() == "u1");
}

TEST_CASE("slot feeds respect the cutoff and chain state") {
  PoolConfig cfg = fixtures::example_pool();
  auto tx = fixtures::example_orders();
  std::vector<TimedOrder> orders;
  for (std::size_t j = 0; j < tx.size(); ++j) orders.push_back({j, tx[j]});
  std::vector<TimedReport> reports{{0, {1, 4.0}}, {1, {2, 1.0}}};
  SlotResult r = run_slot(cfg, {4, 100}, orders, reports, 10);
  CHECK(close(r.outcome.payment_of(1), 18.0));
  CHECK(close(r.outcome.payment_of(2), 36.0));
  CHECK(approx_equal(r.post_state, {20, 20}));

  CHECK_THROWS_AS(run_slot(cfg, {4, 100}, orders, {}, 10), Error);

  RoundEngine engine(cfg, {4, 100});
  for (auto& o : orders) engine.submit(o);
  engine.submit(TimedReport{0, {1, 4.0}});
  engine.submit(TimedReport{1, {2, 1.0}});
  engine.submit(TimedReport{20, {1, 2.0}});
  engine.submit(TimedOrder{15, SwapOrder(Direction::XtoY, 2.0, 1.0, "late")});
  SlotResult first = engine.run_slot(10);
  CHECK(approx_equal(engine.pool().state, {20, 20}));
  CHECK(engine.pending_orders() == 1);
  CHECK(engine.pending_reports() == 1);
  SlotResult second = engine.run_slot(30);
  CHECK(approx_equal(second.outcome.bundle.start, first.post_state));
  CHECK(approx_equal(engine.pool().state, {std::sqrt(200.0), std::sqrt(800.0)}));
}

TEST_CASE("fees accumulate across slots") {
  PoolConfig cfg = PoolConfig::constant_product(400.0, 0.003);
  RoundEngine engine(cfg, {4, 100});
  engine.submit(TimedOrder{0, fixtures::example_orders()[0]});
  engine.submit(TimedReport{0, {1, 4.0}});
  SlotResult a = engine.run_slot(1);
  CHECK(close(a.fees.x, 8.0 / 0.997 - 8.0));
  engine.submit(TimedOrder{1, fixtures::example_orders()[0]});
  engine.submit(TimedReport{1, {1, 4.0}});
  SlotResult b = engine.run_slot(2);
  CHECK(close(b.fees.x, 2.0 * (8.0 / 0.997 - 8.0)));
}
