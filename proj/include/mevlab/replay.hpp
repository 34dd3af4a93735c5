#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mevlab/beliefs.hpp"
#include "mevlab/mechanisms.hpp"

namespace mevlab {

struct Candle {
  long long block = 0;
  double low = 0.0;
  double high = 0.0;

  double mid() const { return 0.5 * (low + high); }
};

struct ReplayOrder {
  long long block = 0;
  SwapOrder order;
  std::optional<double> ref_price;  // defaults to the order's limit price
};

// Everything needed to replay one block.
struct BlockInput {
  long long block = 0;
  PoolConfig config;
  PoolState state;
  std::vector<ReplayOrder> orders;
  Candle candle;
};

// What the "without" side of the LVR comparison is.
enum class Baseline {
  Midpoint,      // one arbitrageur rebalances to the candle midpoint
  WinnerBelief,  // one arbitrageur holding the winning belief rebalances, paying nothing
};

std::string_view to_string(Baseline b);
Baseline parse_baseline(std::string_view name);

struct ReplayConfig {
  std::size_t n_arbs = 20;
  BeliefDistribution::Kind belief = BeliefDistribution::Kind::Gaussian;
  double sigma_rel = 0.001;
  double pareto_alpha = 1.5;
  std::vector<double> fees{0.0};
  double priority_fee = 0.0;  // flat numeraire deduction per executed order
  Baseline baseline = Baseline::WinnerBelief;
  std::uint64_t seed = 1;
};

struct OrderMetrics {
  std::size_t index = 0;
  std::string owner;
  Direction side = Direction::XtoY;
  bool executed = false;
  double exec_price = 0.0;  // numeraire per risky unit, refund and fee included
  double ref_price = 0.0;
  double refund = 0.0;
  bool better = false;
  bool tie = false;
};

struct BlockMetrics {
  long long block = 0;
  double fee = 0.0;
  std::size_t n_arbs = 0;
  std::vector<OrderMetrics> orders;
  double lvr_without = 0.0;
  double loss_with = 0.0;
  std::optional<double> reduction_ratio;  // absent when lvr_without == 0
  double lp_refund = 0.0;
  double budget_residual = 0.0;
  double conservation_residual = 0.0;
};

// Belief distribution for one block's candle.
BeliefDistribution block_beliefs(const ReplayConfig& cfg, const Candle& candle);

BlockMetrics replay_block(const ReplayConfig& cfg, double fee, const BlockInput& input, std::mt19937_64& rng);

// Replays every block under every fee. Each block draws from its own seeded
// stream, identical across fees.
std::vector<BlockMetrics> replay(const ReplayConfig& cfg, std::span<const BlockInput> blocks);

struct RatioQuantiles {
  double q10 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q90 = 0.0;
};

struct FeeSummary {
  double fee = 0.0;
  std::size_t blocks = 0;
  std::size_t orders = 0;
  std::size_t executed = 0;
  std::size_t better = 0;
  std::size_t ties = 0;
  double better_pct = 0.0;  // of all orders
  std::size_t ratio_blocks = 0;
  RatioQuantiles ratio;
};

struct Summary {
  FeeSummary overall;
  std::vector<FeeSummary> per_fee;  // ascending fee
};

Summary aggregate(std::span<const BlockMetrics> metrics);

// Linear-interpolation quantile of unsorted data; p in [0, 1].
double quantile(std::vector<double> data, double p);

nlohmann::json summary_to_json(const Summary& s);
void write_metrics_csv(std::ostream& out, std::span<const BlockMetrics> metrics);

struct SyntheticParams {
  std::size_t blocks = 1000;
  double k = 1e8;
  double price = 2000.0;
  double price_drift = 0.02;      // log-sd of the block midpoint around `price`
  double mispricing_sd = 0.05;    // log-sd of pool price around the midpoint
  double band_rel = 0.005;        // candle half-width relative to the midpoint
  std::size_t max_orders = 3;
  double slippage_low = 0.001;
  double slippage_high = 0.01;
  double size_low = 0.0005;       // order input relative to the matching reserve
  double size_high = 0.005;
  std::uint64_t seed = 1;
};

std::vector<BlockInput> synthetic_blocks(const SyntheticParams& params);

// Joins orders, candles and pool snapshots by block id. Every pool block
// needs a candle; every order needs a pool block. Throws Schema otherwise.
// `k` overrides the curve constant; by default each block uses x*y.
std::vector<BlockInput> load_blocks(const std::string& orders_csv, const std::string& candles_csv,
                                    const std::string& pools_csv, std::optional<double> k = std::nullopt);

}  // namespace mevlab
