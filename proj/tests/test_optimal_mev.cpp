#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "mevlab/error.hpp"
#include "mevlab/optimal_mev.hpp"
#include "mevlab/valuation.hpp"

using namespace mevlab;
using fixtures::close;

namespace {

std::vector<SwapOrder> random_orders(std::mt19937_64& rng, double spot, std::size_t m, double scale) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<SwapOrder> out;
  for (std::size_t j = 0; j < m; ++j) {
    double p = spot * std::exp(u(rng) * 2.0 - 1.0);
    double size = scale * std::exp(u(rng) * 3.0 - 3.0);
    if (u(rng) < 0.5) {
      out.emplace_back(Direction::XtoY, size, size * p);
    } else {
      out.emplace_back(Direction::YtoX, size * p, size);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("worked example bundle") {
  PoolConfig cfg = fixtures::example_pool();
  Bundle b = optimal_bundle(cfg, {4, 100}, fixtures::example_orders(), 4.0, 1);
  REQUIRE(b.steps.size() == 5);
  CHECK(b.steps[0].origin.role == Role::Front);
  CHECK(b.steps[1].origin.role == Role::User);
  CHECK(b.steps[2].origin.role == Role::Front);
  CHECK(b.steps[3].origin.role == Role::User);
  CHECK(b.steps[4].origin.role == Role::Rebalance);
  CHECK(b.included_orders == std::vector<std::size_t>{0, 1});
  ExecutionTrace t = execute(cfg, b);
  CHECK(approx_equal(t.states[1], {8, 50}));
  CHECK(approx_equal(t.states[2], {16, 25}));
  CHECK(approx_equal(t.states[3], {20, 20}));
  CHECK(approx_equal(t.states[4], {50, 8}));
  CHECK(approx_equal(t.end(), {10, 40}));
  CHECK(close(bundle_profit(cfg, b, 4.0), 151.0));
  CHECK(close(bundle_profit(cfg, b, 4.0, 1), 151.0));
  CHECK(bundle_profit(cfg, b, 4.0, 2) == 0.0);
}

TEST_CASE("no orders") {
  PoolConfig cfg = fixtures::example_pool();
  Bundle b = optimal_bundle(cfg, {4, 100}, {}, 4.0);
  REQUIRE(b.steps.size() == 1);
  CHECK(b.steps[0].origin.role == Role::Rebalance);
  CHECK(close(bundle_profit(cfg, b, 4.0), 36.0));

  Bundle at = optimal_bundle(cfg, {4, 100}, {}, 25.0);
  CHECK(at.steps.empty());
  CHECK(bundle_profit(cfg, at, 25.0) == 0.0);
}

TEST_CASE("user-only bundles earn the arbitrageur nothing") {
  PoolConfig cfg = fixtures::example_pool();
  Bundle b;
  b.start = {8, 50};
  b.steps.push_back({Direction::XtoY, 8.0, 25.0, StepOrigin::user(0)});
  CHECK(bundle_profit(cfg, b, 4.0) == 0.0);
}

TEST_CASE("sandwich-every-order variant extracts the same value") {
  PoolConfig cfg = fixtures::example_pool();
  auto tx = fixtures::example_orders();
  PoolState s0{4, 100}, cur = s0;
  Bundle b;
  b.start = s0;
  for (std::size_t j : {0u, 1u}) {
    PoolState l = limit_state(cfg.curve_ref(), tx[j]);
    if (auto s = move_step(cur, l, StepOrigin::front(1, j))) b.steps.push_back(*s);
    b.steps.push_back({tx[j].direction(), tx[j].delta_in(), tx[j].delta_out(), StepOrigin::user(j)});
    Impact d = impact(tx[j]);
    PoolState after{l.x + d.dx, l.y + d.dy};
    if (auto s = move_step(after, s0, StepOrigin::back(1, j))) b.steps.push_back(*s);
    cur = s0;
  }
  b.steps.push_back(*move_step(s0, {10, 40}, StepOrigin::rebalance(1)));
  CHECK(close(bundle_profit(cfg, b, 4.0), 151.0));
}

TEST_CASE("brute force agrees on the worked example") {
  PoolConfig cfg = fixtures::example_pool();
  auto tx = fixtures::example_orders();
  double bf = brute_force_best_profit(cfg, {4, 100}, tx, 4.0, 64);
  CHECK(std::fabs(bf - 151.0) <= 1e-6);
  CHECK(close(brute_force_best_profit(cfg, {4, 100}, {}, 4.0), 36.0));
  std::vector<SwapOrder> neg{tx[2]};
  CHECK(close(brute_force_best_profit(cfg, {4, 100}, neg, 4.0), 36.0));

  std::vector<SwapOrder> five(5, tx[0]);
  CHECK_THROWS_AS(brute_force_best_profit(cfg, {4, 100}, five, 4.0), Error);
}

TEST_CASE("optimal profit identity, order insensitivity and end state") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    double k = std::exp(std::log(100.0) + u(rng) * std::log(1e4));
    PoolConfig cfg = PoolConfig::constant_product(k);
    double spot = std::exp(std::log(0.1) + u(rng) * std::log(1000.0));
    PoolState s0 = state_at_price(cfg.curve_ref(), spot);
    double v = spot * std::exp(u(rng) - 0.5);
    auto orders = random_orders(rng, spot, 1 + trial % 4, s0.x);

    Bundle b = optimal_bundle(cfg, s0, orders, v);
    double expect = potential(cfg.curve_ref(), s0, v);
    for (const auto& o : orders) expect += tx_value(o, v);
    CHECK(close(bundle_profit(cfg, b, v), expect, 1e-9));
    CHECK(close(optimal_profit(cfg, s0, orders, v), expect, 1e-9));
    CHECK(approx_equal(execute(cfg, b).end(), state_at_price(cfg.curve_ref(), v)));
    CHECK(close(lvr(cfg, b, v), potential(cfg.curve_ref(), s0, v), 1e-9));

    std::vector<std::size_t> perm(orders.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<SwapOrder> shuffled;
    for (std::size_t p : perm) shuffled.push_back(orders[p]);
    Bundle b2 = optimal_bundle(cfg, s0, shuffled, v);
    CHECK(close(bundle_profit(cfg, b2, v), expect, 1e-9));
    std::vector<std::size_t> inc1 = b.included_orders, inc2;
    for (std::size_t j : b2.included_orders) inc2.push_back(perm[j]);
    std::sort(inc2.begin(), inc2.end());
    CHECK(inc1 == inc2);
  }
}
