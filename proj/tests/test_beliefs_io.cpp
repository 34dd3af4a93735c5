#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "fixtures.hpp"
#include "mevlab/beliefs.hpp"
#include "mevlab/error.hpp"
#include "mevlab/io.hpp"
#include "mevlab/rng.hpp"

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
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("gaussian with zero spread returns the band midpoint") {
  std::mt19937_64 rng(3);
  for (double q : sample_beliefs(BeliefDistribution::gaussian(3900.0, 4100.0, 0.0), 50, rng)) CHECK(q == 4000.0);
}

TEST_CASE("pareto samples stay on the support") {
  std::mt19937_64 rng(4);
  auto qs = sample_beliefs(BeliefDistribution::pareto(100.0, 1e6, 1.5), 10000, rng);
  CHECK(*std::min_element(qs.begin(), qs.end()) >= 100.0);
  CHECK(*std::max_element(qs.begin(), qs.end()) <= 1e6);
}

TEST_CASE("gaussian sample mean is within three standard errors") {
  std::mt19937_64 rng(5);
  const std::size_t n = 10000;
  auto dist = BeliefDistribution::gaussian(3900.0, 4100.0, 0.01);
  auto qs = sample_beliefs(dist, n, rng);
  double mean = std::accumulate(qs.begin(), qs.end(), 0.0) / n;
  CHECK(std::fabs(mean - 4000.0) <= 3.0 * 40.0 / std::sqrt(double(n)));
  for (double q : qs) CHECK((q >= 3900.0 && q <= 4100.0));
}

TEST_CASE("uniform quantiles are linear") {
  auto d = BeliefDistribution::uniform(2.0, 6.0);
  CHECK(d.quantile(0.0) == 2.0);
  CHECK(close(d.quantile(0.25), 3.0));
  CHECK(d.quantile(1.0) == 6.0);
}

TEST_CASE("quantiles are monotone for every kind") {
  for (auto d : {BeliefDistribution::gaussian(1.0, 3.0, 0.2), BeliefDistribution::pareto(1.0, 3.0),
                 BeliefDistribution::uniform(1.0, 3.0)}) {
    double prev = 0.0;
    for (int i = 0; i <= 20; ++i) {
      double q = d.quantile(i / 20.0);
      CHECK(q >= prev);
      CHECK((q >= 1.0 && q <= 3.0));
      prev = q;
    }
  }
}

TEST_CASE("invalid distributions are rejected") {
  std::mt19937_64 rng(1);
  CHECK(code_of([&] { sample_beliefs(BeliefDistribution::uniform(2.0, 1.0), 1, rng); }) ==
        ErrorCode::InvalidDistribution);
  CHECK(code_of([&] { sample_beliefs(BeliefDistribution::uniform(0.0, 1.0), 1, rng); }) ==
        ErrorCode::InvalidDistribution);
  CHECK(code_of([&] { sample_beliefs(BeliefDistribution::pareto(1.0, 2.0, 1.0), 1, rng); }) ==
        ErrorCode::InvalidDistribution);
  CHECK(code_of([&] { sample_beliefs(BeliefDistribution::gaussian(1.0, 2.0, -0.1), 1, rng); }) ==
        ErrorCode::InvalidDistribution);
  CHECK(code_of([] { parse_belief_kind("cauchy"); }) == ErrorCode::InvalidDistribution);
}

TEST_CASE("belief draws are prefixes across sample sizes") {
  auto d = BeliefDistribution::gaussian(90.0, 110.0, 0.05);
  std::mt19937_64 a = substream(9, 2), b = substream(9, 2);
  auto small = sample_beliefs(d, 5, a);
  auto large = sample_beliefs(d, 20, b);
  CHECK(std::equal(small.begin(), small.end(), large.begin()));
}

TEST_CASE("substreams differ by index and repeat by seed") {
  CHECK(substream_seed(1, 0) != substream_seed(1, 1));
  CHECK(substream_seed(1, 0) != substream_seed(2, 0));
  CHECK(substream_seed(5, 7) == substream_seed(5, 7));
}

TEST_CASE("slot json round trip") {
  PoolConfig cfg = fixtures::example_pool();
  SlotInput in = fixtures::example_slot();
  io::SlotFile back = io::slot_from_json(io::slot_to_json(cfg, in));
  CHECK(back.config.curve_ref().y_given_x(4.0) == 100.0);
  CHECK(back.input.s0.x == 4.0);
  CHECK(back.input.s0.y == 100.0);
  REQUIRE(back.input.orders.size() == 3);
  CHECK(back.input.orders[2].direction() == Direction::YtoX);
  CHECK(back.input.orders[2].owner() == "u3");
  REQUIRE(back.input.reports.size() == 2);
  CHECK(back.input.reports[0].arb == 1);
  CHECK(back.input.seed == 7);
}

TEST_CASE("pool json defaults the invariant to the reserves") {
  auto params = io::pool_from_json(nlohmann::json::parse(R"({"reserves":[4,100],"fee":0.003})"));
  CHECK(params.config.fee == 0.003);
  CHECK(close(params.config.curve_ref().y_given_x(8.0), 50.0));
  CHECK(code_of([] { io::pool_from_json(nlohmann::json::parse(R"({"fee":0})")); }) == ErrorCode::Schema);
  CHECK(code_of([] { io::pool_from_json(nlohmann::json::parse(R"({"curve":{"type":"hyperbolic","k":1}})")); }) ==
        ErrorCode::Schema);
}

TEST_CASE("slot json rejects malformed input") {
  CHECK(code_of([] { io::slot_from_json(nlohmann::json::parse(R"({"orders":[]})")); }) == ErrorCode::Schema);
  CHECK(code_of([] {
          io::order_from_json(nlohmann::json::parse(R"({"side":"sideways","delta_in":1,"delta_out":1,"owner":"a"})"));
        }) == ErrorCode::Schema);
  CHECK(code_of([] {
          io::order_from_json(nlohmann::json::parse(R"({"side":"XY","delta_in":"lots","delta_out":1,"owner":"a"})"));
        }) == ErrorCode::Schema);
}

TEST_CASE("csv reader handles quoting and reports missing columns") {
  std::istringstream in("block,owner,x\n1,\"a,b\",2.5\n2,\"say \"\"hi\"\"\",3\n");
  io::CsvTable t = io::read_csv(in);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][t.column("owner")] == "a,b");
  CHECK(t.rows[1][t.column("owner")] == "say \"hi\"");
  CHECK(io::parse_number(t.rows[0][t.column("x")]) == 2.5);
  CHECK(io::parse_integer(t.rows[1][t.column("block")]) == 2);
  CHECK_FALSE(t.has_column("y"));
  CHECK(code_of([&] { t.column("y"); }) == ErrorCode::Schema);
  CHECK(code_of([] { io::parse_number("1.5x"); }) == ErrorCode::Schema);
  CHECK(code_of([] { io::parse_number(""); }) == ErrorCode::Schema);
  CHECK(code_of([] { io::parse_integer("2.5"); }) == ErrorCode::Schema);
  CHECK(code_of([] { io::read_csv_file("/nonexistent/file.csv"); }) == ErrorCode::Schema);
}

TEST_CASE("csv rows with the wrong width are rejected") {
  std::istringstream in("a,b\n1,2,3\n");
  CHECK(code_of([&] { io::read_csv(in); }) == ErrorCode::Schema);
}
