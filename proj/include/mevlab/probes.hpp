#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mevlab/beliefs.hpp"
#include "mevlab/mechanisms.hpp"

namespace mevlab {

// A pool, its pending real orders and every arbitrageur's true belief.
// Arbitrageur ids are the indices into `beliefs`.
struct Instance {
  PoolConfig config;
  PoolState s0;
  std::vector<SwapOrder> orders;
  std::vector<double> beliefs;
};

nlohmann::json instance_to_json(const Instance& inst);

struct InstanceParams {
  std::size_t min_orders = 0;
  std::size_t max_orders = 4;
  std::size_t min_arbs = 2;
  std::size_t max_arbs = 5;
  double k_low = 100.0;
  double k_high = 1e6;
  double price_low = 0.1;
  double price_high = 100.0;
  double belief_spread = 0.3;       // log-sd of beliefs around the pool price
  double order_spread = 0.3;        // log half-width of order prices around the pool price
  double max_order_fraction = 0.3;  // order input relative to the matching reserve
  double fee = 0.0;
};

using InstanceSampler = std::function<Instance(std::mt19937_64&)>;

Instance sample_instance(const InstanceParams& params, std::mt19937_64& rng);
InstanceSampler make_instance_sampler(InstanceParams params = {});

// Random Sybil sets. An "overpriced" Sybil trades far below the pool price,
// handing every bidder a large value.
struct SybilParams {
  std::size_t min_orders = 1;
  std::size_t max_orders = 2;
  double overpriced_share = 0.5;
  double large_size_low = 0.5;   // relative to the matching reserve
  double large_size_high = 5.0;
  double discount_low = 0.05;    // overpriced limit = discount * pool price
  double discount_high = 0.9;
};

using SybilSampler = std::function<std::vector<SwapOrder>(std::mt19937_64&, const Instance&)>;

SybilSampler make_sybil_sampler(SybilParams params = {});

struct ProbeReport {
  std::string probe;
  MechanismKind mechanism = MechanismKind::Rediswap;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  double max_violation = 0.0;       // largest gain (truthfulness) or utility drop (sybil)
  double max_abs_difference = 0.0;  // sybil: largest |utility change| of any real user
  std::size_t mechanism_runs = 0;
  double max_budget_residual = 0.0;
  double max_conservation_residual = 0.0;
  std::optional<nlohmann::json> witness;

  bool passed() const { return max_violation <= tolerance; }
};

nlohmann::json report_to_json(const ProbeReport& r);

// 21 log-spaced factors from 0.5 to 2.0, including 1.0 exactly.
std::vector<double> default_deviation_grid(std::size_t points = 21);

// Largest utility gain a designated arbitrageur gets by reporting
// factor * belief instead of its belief, with the others truthful.
ProbeReport truthfulness_probe(MechanismKind mechanism, const InstanceSampler& sampler,
                               std::span<const double> deviation_grid, std::size_t trials, std::uint64_t seed);

// Largest drop in any real user's utility when a Sybil set is added, with
// reports held fixed at the true beliefs.
ProbeReport sybil_probe(MechanismKind mechanism, const InstanceSampler& sampler, const SybilSampler& sybils,
                        std::size_t trials, std::uint64_t seed);

struct ArbitrageurProfile {
  double belief = 0.0;
  double budget_x = 0.0;  // risky units available for a selling Sybil
  double budget_y = 0.0;  // numeraire units available for a buying Sybil
  BeliefDistribution prior;
};

// At most one selling (X->Y) and one buying (Y->X) Sybil order.
struct SybilStrategy {
  std::optional<double> t_sell;  // output asked by the X->Y leg
  std::optional<double> t_buy;   // output asked by the Y->X leg
  double expected_sell = 0.0;
  double expected_buy = 0.0;

  bool empty() const { return !t_sell && !t_buy; }
  std::vector<SwapOrder> orders(const ArbitrageurProfile& profile, const std::string& owner) const;
};

// Profit of one Sybil leg (full budget in, t_out asked) to its owner when it
// reports `report` and competitors report their beliefs truthfully. Zero if
// the owner wins its own order or the order is left out. On exact value ties
// the competitor is taken as the winner.
double sybil_leg_profit(const ArbitrageurProfile& profile, Direction leg, double report, double t_out,
                          std::span<const double> other_beliefs);

// The same quantity measured through the mechanism: the owner's utility with
// the Sybil order minus its utility without it. `others` must not contain
// `self`.
double sybil_profit_measured(const PoolConfig& config, PoolState s0, std::span<const SwapOrder> real_orders,
                             const ArbitrageurProfile& profile, ArbId self, Direction leg, double report,
                             double t_out, std::span<const ArbitrageurReport> others);

// Monte Carlo draws of competitor beliefs: result[s][k] for sample s and
// competitor k. Reproducible for a given seed.
std::vector<std::vector<double>> competitor_samples(std::span<const BeliefDistribution> priors,
                                                    std::size_t mc_samples, std::uint64_t seed);

// Expected Sybil profit maximised over a log-spaced grid of asked outputs,
// refined with every per-sample breakpoint so the in-sample optimum is exact.
SybilStrategy optimize_sybil(const ArbitrageurProfile& profile, std::span<const BeliefDistribution> competitor_priors,
                             std::size_t grid_n = 128, std::size_t mc_samples = 2000, std::uint64_t seed = 0);

// Sample mean of the leg's profit at a given ask over precomputed samples.
double expected_sybil_profit(const ArbitrageurProfile& profile, Direction leg, double report, double t_out,
                             const std::vector<std::vector<double>>& samples);

struct NashConfig {
  PoolConfig config = PoolConfig::constant_product(1e4);
  PoolState s0{100.0, 100.0};
  std::vector<SwapOrder> orders;
  std::vector<BeliefDistribution> priors;  // one per arbitrageur
  double budget_fraction = 0.1;
  std::size_t grid_n = 128;
  std::size_t mc_samples = 2000;
  std::vector<double> report_factors{0.9, 0.97, 1.0, 1.03, 1.1};
  std::size_t t_points = 3;
  std::vector<double> deviator_quantiles{0.25, 0.5, 0.75};
  ArbId deviator = 0;
  double z = 2.0;
  std::uint64_t seed = 1;
};

struct DeviationRow {
  double belief = 0.0;
  double report = 0.0;
  std::optional<double> t_sell;
  std::optional<double> t_buy;
  double mean_gain = 0.0;
  double std_error = 0.0;
};

struct NashReport {
  std::vector<DeviationRow> rows;
  std::vector<double> equilibrium_utility;  // per deviator belief
  std::vector<SybilStrategy> equilibrium;   // per deviator belief
  double max_excess = 0.0;  // max over rows of mean_gain - z * std_error - float slack
  std::size_t mechanism_runs = 0;
  double max_budget_residual = 0.0;
  double max_conservation_residual = 0.0;

  bool passed() const { return max_excess <= 0.0; }
};

nlohmann::json report_to_json(const NashReport& r);

// Everyone plays (true belief, optimized Sybils); the deviator tries a grid
// of reports and Sybil asks. Expectations use common random numbers shared
// with the optimizer.
NashReport nash_check(const NashConfig& cfg);

}  // namespace mevlab
