#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "mevlab/bundle.hpp"
#include "mevlab/error.hpp"

using namespace mevlab;
using fixtures::close;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Schema;
}

}  // namespace

TEST_CASE("spot price on the constant-product curve") {
  ConstantProduct c(400.0);
  CHECK(spot_price(c, {4, 100}) == doctest::Approx(25.0));
  CHECK(spot_price(c, {20, 20}) == doctest::Approx(1.0));
  CHECK(spot_price(c, {10, 40}) == doctest::Approx(4.0));
  CHECK(code_of([&] { spot_price(c, {4, 101}); }) == ErrorCode::CurveViolation);
}

TEST_CASE("state at price") {
  ConstantProduct c(400.0);
  PoolState a = state_at_price(c, 4.0);
  CHECK(close(a.x, 10.0));
  CHECK(close(a.y, 40.0));
  PoolState b = state_at_price(c, 1.0);
  CHECK(close(b.x, 20.0));
  CHECK(close(b.y, 20.0));
  PoolState d = state_at_price(c, 25.0);
  CHECK(close(d.x, 4.0));
  CHECK(close(d.y, 100.0));
  CHECK(code_of([&] { state_at_price(c, 0.0); }) == ErrorCode::InvalidPrice);
  CHECK(code_of([&] { state_at_price(c, -3.0); }) == ErrorCode::InvalidPrice);
}

TEST_CASE("bisection path agrees with the closed form") {
  fixtures::BisectedProduct generic(400.0);
  ConstantProduct closed(400.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> logp(std::log(1e-3), std::log(1e3));
  for (int i = 0; i < 500; ++i) {
    double v = std::exp(logp(rng));
    PoolState g = state_at_price(generic, v);
    PoolState c = state_at_price(closed, v);
    CHECK(close(g.x, c.x, 1e-9));
    CHECK(close(g.y, c.y, 1e-9));
  }
}

TEST_CASE("state at price inverts spot price and is monotone") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> logk(std::log(100.0), std::log(1e6));
  std::uniform_real_distribution<double> logx(std::log(0.01), std::log(1e4));
  for (int i = 0; i < 1000; ++i) {
    ConstantProduct c(std::exp(logk(rng)));
    double x = std::exp(logx(rng));
    PoolState s{x, c.y_given_x(x)};
    PoolState back = state_at_price(c, spot_price(c, s));
    CHECK(approx_equal(s, back, 1e-9));
    double v = spot_price(c, s);
    CHECK(state_at_price(c, v * 1.001).x < state_at_price(c, v).x);
    // x up means y down and the price falls.
    PoolState s2{x * 1.01, c.y_given_x(x * 1.01)};
    CHECK(s2.y < s.y);
    CHECK(c.marginal_rate(s2) < c.marginal_rate(s));
  }
}

TEST_CASE("apply_swap moves along the curve") {
  PoolConfig cfg = PoolConfig::constant_product(400.0);
  SwapStep s{Direction::XtoY, 4.0, 50.0, StepOrigin::user(0)};
  StepResult r = apply_swap(cfg, {4, 100}, s);
  CHECK(close(r.post.x, 8.0));
  CHECK(close(r.post.y, 50.0));

  SwapStep s2{Direction::XtoY, 8.0, 25.0, StepOrigin::user(0)};
  StepResult r2 = apply_swap(cfg, {8, 50}, s2);
  CHECK(close(r2.post.x, 16.0));
  CHECK(close(r2.post.y, 25.0));

  SwapStep zero{Direction::XtoY, 0.0, 0.0, StepOrigin::user(0)};
  CHECK(code_of([&] { apply_swap(cfg, {4, 100}, zero); }) == ErrorCode::InvalidStep);

  SwapStep off{Direction::XtoY, 4.0, 49.0, StepOrigin::user(0)};
  CHECK(code_of([&] { apply_swap(cfg, {4, 100}, off); }) == ErrorCode::CurveViolation);

  SwapStep drain{Direction::XtoY, 4.0, 100.0, StepOrigin::user(0)};
  CHECK(code_of([&] { apply_swap(cfg, {4, 100}, drain); }) == ErrorCode::NegativeReserve);
}

TEST_CASE("user steps pay the fee, arbitrage steps do not") {
  PoolConfig cfg = PoolConfig::constant_product(400.0, 0.003);
  double gross = gross_input(cfg, 4.0);
  SwapStep user{Direction::XtoY, gross, 50.0, StepOrigin::user(0)};
  StepResult r = apply_swap(cfg, {4, 100}, user);
  CHECK(close(r.post.x, 8.0));
  CHECK(close(r.fee.x, gross * 0.003));
  CHECK(r.fee.y == 0.0);

  SwapStep arb{Direction::XtoY, 4.0, 50.0, StepOrigin::front(1, 0)};
  StepResult a = apply_swap(cfg, {4, 100}, arb);
  CHECK(a.fee.x == 0.0);
  CHECK(close(a.post.x, 8.0));
}

TEST_CASE("round trip restores the state") {
  PoolConfig cfg = PoolConfig::constant_product(400.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 50.0);
  for (int i = 0; i < 500; ++i) {
    PoolState s0{4, 100};
    double a = u(rng);
    double out = s0.y - 400.0 / (s0.x + a);
    PoolState mid = apply_swap(cfg, s0, {Direction::XtoY, a, out, StepOrigin::user(0)}).post;
    PoolState back = apply_swap(cfg, mid, {Direction::YtoX, out, a, StepOrigin::back(1, 0)}).post;
    CHECK(approx_equal(back, s0));
  }
}

TEST_CASE("conservation over random step sequences") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double fee : {0.0, 0.003}) {
    PoolConfig cfg = PoolConfig::constant_product(1e4, fee);
    for (int trial = 0; trial < 100; ++trial) {
      Bundle b;
      b.start = state_at_price(cfg.curve_ref(), 2.0);
      PoolState cur = b.start;
      for (int k = 0; k < 8; ++k) {
        bool user = u(rng) < 0.5;
        double target_p = 2.0 * std::exp(u(rng) - 0.5);
        PoolState to = state_at_price(cfg.curve_ref(), target_p);
        auto step = move_step(cur, to, user ? StepOrigin::user(0) : StepOrigin::front(1, 0));
        if (!step) continue;
        if (user) step->amount_in = gross_input(cfg, step->amount_in);
        b.steps.push_back(*step);
        cur = to;
      }
      ExecutionTrace t = execute(cfg, b);
      CHECK(conservation_residual(b, t) <= 1e-9);
      CHECK(t.fees.x >= 0.0);
      CHECK(t.fees.y >= 0.0);
    }
  }
}

TEST_CASE("pool config validation") {
  CHECK(code_of([] { PoolConfig::constant_product(400.0, 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { PoolConfig::constant_product(-1.0); }) == ErrorCode::InvalidArgument);
}
