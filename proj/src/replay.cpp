#include "mevlab/replay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "mevlab/error.hpp"
#include "mevlab/io.hpp"
#include "mevlab/parallel.hpp"
#include "mevlab/rng.hpp"
#include "mevlab/valuation.hpp"

namespace mevlab {

std::string_view to_string(Baseline b) { return b == Baseline::Midpoint ? "midpoint" : "winner"; }

Baseline parse_baseline(std::string_view name) {
  if (name == "midpoint") return Baseline::Midpoint;
  if (name == "winner") return Baseline::WinnerBelief;
  throw Error(ErrorCode::InvalidArgument, "unknown baseline '" + std::string(name) + "'");
}

BeliefDistribution block_beliefs(const ReplayConfig& cfg, const Candle& candle) {
  switch (cfg.belief) {
    case BeliefDistribution::Kind::Gaussian: return BeliefDistribution::gaussian(candle.low, candle.high, cfg.sigma_rel);
    case BeliefDistribution::Kind::Pareto: return BeliefDistribution::pareto(candle.low, candle.high, cfg.pareto_alpha);
    case BeliefDistribution::Kind::Uniform: return BeliefDistribution::uniform(candle.low, candle.high);
  }
  throw Error(ErrorCode::InvalidDistribution, "unknown belief kind");
}

BlockMetrics replay_block(const ReplayConfig& cfg, double fee, const BlockInput& input, std::mt19937_64& rng) {
  if (cfg.n_arbs < 1) throw Error(ErrorCode::InvalidArgument, "need at least one arbitrageur");
  if (!(input.candle.low > 0.0) || !(input.candle.high >= input.candle.low)) {
    throw Error(ErrorCode::InvalidDistribution, "candle must satisfy 0 < low <= high");
  }
  PoolConfig pool = input.config;
  pool.fee = fee;
  validate(pool);

  const std::vector<double> beliefs = sample_beliefs(block_beliefs(cfg, input.candle), cfg.n_arbs, rng);
  SlotInput slot;
  slot.s0 = input.state;
  slot.seed = rng();
  for (const ReplayOrder& o : input.orders) slot.orders.push_back(o.order);
  for (std::size_t i = 0; i < beliefs.size(); ++i) slot.reports.push_back({static_cast<ArbId>(i), beliefs[i]});
  MechanismOutcome out = rediswap_run(pool, slot);

  BlockMetrics m;
  m.block = input.block;
  m.fee = fee;
  m.n_arbs = cfg.n_arbs;
  m.lp_refund = out.lp_refund;
  m.budget_residual = budget_residual(out);
  m.conservation_residual = conservation_residual(out);

  for (std::size_t j = 0; j < input.orders.size(); ++j) {
    const SwapOrder& o = input.orders[j].order;
    const OrderFill& f = out.fills[j];
    OrderMetrics om;
    om.index = j;
    om.owner = o.owner();
    om.side = o.direction();
    om.executed = f.executed;
    om.refund = out.refunds[j];
    om.ref_price = input.orders[j].ref_price.value_or(o.limit_price());
    if (f.executed) {
      if (o.direction() == Direction::XtoY) {
        om.exec_price = (f.received + om.refund - cfg.priority_fee) / f.paid;
        om.better = om.exec_price > om.ref_price;
      } else {
        om.exec_price = (f.paid - om.refund + cfg.priority_fee) / f.received;
        om.better = om.exec_price < om.ref_price;
      }
      om.tie = om.exec_price == om.ref_price;
    }
    m.orders.push_back(om);
  }

  const TradingCurve& curve = pool.curve_ref();
  if (cfg.baseline == Baseline::WinnerBelief) {
    const ItemAudit& init = out.audit.back();
    m.lvr_without = init.winning_value;
    m.loss_with = init.winning_value - init.second_value;
  } else {
    m.lvr_without = potential(curve, input.state, input.candle.mid());
    m.loss_with = std::clamp(m.lvr_without - out.lp_refund, 0.0, m.lvr_without);
  }
  if (m.lvr_without > 0.0) m.reduction_ratio = std::clamp(m.loss_with / m.lvr_without, 0.0, 1.0);
  return m;
}

std::vector<BlockMetrics> replay(const ReplayConfig& cfg, std::span<const BlockInput> blocks) {
  if (cfg.fees.empty()) throw Error(ErrorCode::InvalidArgument, "fee list is empty");
  const std::size_t nb = blocks.size();
  std::vector<BlockMetrics> out(nb * cfg.fees.size());
  parallel_for(out.size(), [&](std::size_t idx) {
    std::size_t f = idx / nb, b = idx % nb;
    std::mt19937_64 rng = substream(cfg.seed, static_cast<std::uint64_t>(blocks[b].block));
    out[idx] = replay_block(cfg, cfg.fees[f], blocks[b], rng);
  });
  return out;
}

double quantile(std::vector<double> data, double p) {
  if (data.empty()) throw Error(ErrorCode::EmptyInput, "quantile of empty data");
  std::sort(data.begin(), data.end());
  double h = std::clamp(p, 0.0, 1.0) * static_cast<double>(data.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, data.size() - 1);
  return data[lo] + (h - static_cast<double>(lo)) * (data[hi] - data[lo]);
}

namespace {

FeeSummary summarize(std::span<const BlockMetrics* const> ms, double fee) {
  FeeSummary s;
  s.fee = fee;
  std::vector<double> ratios;
  for (const BlockMetrics* m : ms) {
    ++s.blocks;
    for (const OrderMetrics& o : m->orders) {
      ++s.orders;
      s.executed += o.executed;
      s.better += o.better;
      s.ties += o.tie;
    }
    if (m->reduction_ratio) ratios.push_back(*m->reduction_ratio);
  }
  s.better_pct = s.orders ? 100.0 * static_cast<double>(s.better) / static_cast<double>(s.orders) : 0.0;
  s.ratio_blocks = ratios.size();
  if (!ratios.empty()) {
    s.ratio = {quantile(ratios, 0.1), quantile(ratios, 0.25), quantile(ratios, 0.5), quantile(ratios, 0.75),
               quantile(ratios, 0.9)};
  }
  return s;
}

}  // namespace

Summary aggregate(std::span<const BlockMetrics> metrics) {
  if (metrics.empty()) throw Error(ErrorCode::EmptyInput, "no block metrics to aggregate");
  std::map<double, std::vector<const BlockMetrics*>> by_fee;
  std::vector<const BlockMetrics*> all;
  for (const BlockMetrics& m : metrics) {
    by_fee[m.fee].push_back(&m);
    all.push_back(&m);
  }
  Summary s;
  s.overall = summarize(all, by_fee.size() == 1 ? by_fee.begin()->first : std::nan(""));
  for (const auto& [fee, ms] : by_fee) s.per_fee.push_back(summarize(ms, fee));
  return s;
}

namespace {

nlohmann::json fee_json(const FeeSummary& f) {
  nlohmann::json j;
  j["fee"] = std::isnan(f.fee) ? nlohmann::json(nullptr) : nlohmann::json(f.fee);
  j["blocks"] = f.blocks;
  j["orders"] = f.orders;
  j["executed"] = f.executed;
  j["better"] = f.better;
  j["ties"] = f.ties;
  j["better_execution_pct"] = f.better_pct;
  j["ratio_blocks"] = f.ratio_blocks;
  j["reduction_ratio_quantiles"] = {{"0.1", f.ratio.q10},
                                    {"0.25", f.ratio.q25},
                                    {"0.5", f.ratio.q50},
                                    {"0.75", f.ratio.q75},
                                    {"0.9", f.ratio.q90}};
  return j;
}

}  // namespace

nlohmann::json summary_to_json(const Summary& s) {
  nlohmann::json j;
  j["overall"] = fee_json(s.overall);
  j["per_fee"] = nlohmann::json::array();
  for (const FeeSummary& f : s.per_fee) j["per_fee"].push_back(fee_json(f));
  return j;
}

void write_metrics_csv(std::ostream& out, std::span<const BlockMetrics> metrics) {
  using io::format_number;
  out << "block,fee,n_arbs,orders,executed,better,ties,lvr_without,loss_with,reduction_ratio,lp_refund\n";
  for (const BlockMetrics& m : metrics) {
    std::size_t ex = 0, better = 0, ties = 0;
    for (const OrderMetrics& o : m.orders) ex += o.executed, better += o.better, ties += o.tie;
    out << m.block << ',' << format_number(m.fee) << ',' << m.n_arbs << ',' << m.orders.size() << ',' << ex << ','
        << better << ',' << ties << ',' << format_number(m.lvr_without) << ',' << format_number(m.loss_with) << ',';
    if (m.reduction_ratio) out << format_number(*m.reduction_ratio);
    out << ',' << format_number(m.lp_refund) << '\n';
  }
}

std::vector<BlockInput> synthetic_blocks(const SyntheticParams& params) {
  PoolConfig config = PoolConfig::constant_product(params.k);
  std::vector<BlockInput> out;
  out.reserve(params.blocks);
  for (std::size_t b = 0; b < params.blocks; ++b) {
    std::mt19937_64 rng = substream(params.seed, b);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BlockInput in;
    in.block = static_cast<long long>(b);
    in.config = config;
    const double mid = params.price * std::exp(params.price_drift * n(rng));
    in.candle = {in.block, mid * (1.0 - params.band_rel), mid * (1.0 + params.band_rel)};
    in.state = state_at_price(config.curve_ref(), mid * std::exp(params.mispricing_sd * n(rng)));
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, std::max<std::size_t>(1, params.max_orders))(rng);
    for (std::size_t j = 0; j < m; ++j) {
      double slip = params.slippage_low + u(rng) * (params.slippage_high - params.slippage_low);
      double size = params.size_low + u(rng) * (params.size_high - params.size_low);
      std::string owner = "b" + std::to_string(b) + "u" + std::to_string(j);
      if (u(rng) < 0.5) {
        double limit = mid * (1.0 - slip);
        double din = in.state.x * size;
        in.orders.push_back({in.block, SwapOrder(Direction::XtoY, din, din * limit, owner), limit});
      } else {
        double limit = mid * (1.0 + slip);
        double din = in.state.y * size;
        in.orders.push_back({in.block, SwapOrder(Direction::YtoX, din, din / limit, owner), limit});
      }
    }
    out.push_back(std::move(in));
  }
  return out;
}

std::vector<BlockInput> load_blocks(const std::string& orders_csv, const std::string& candles_csv,
                                    const std::string& pools_csv, std::optional<double> k) {
  auto schema = [](const std::string& m) { return Error(ErrorCode::Schema, m); };
  io::CsvTable pools = io::read_csv_file(pools_csv);
  io::CsvTable candles = io::read_csv_file(candles_csv);
  io::CsvTable orders = io::read_csv_file(orders_csv);

  std::map<long long, Candle> candle_by_block;
  {
    auto cb = candles.column("block"), cl = candles.column("low"), ch = candles.column("high");
    for (const auto& r : candles.rows) {
      Candle c{io::parse_integer(r[cb]), io::parse_number(r[cl]), io::parse_number(r[ch])};
      if (!(c.low > 0.0) || !(c.high >= c.low)) throw schema("candle for block " + r[cb] + " has low > high or low <= 0");
      if (!candle_by_block.emplace(c.block, c).second) throw schema("duplicate candle for block " + r[cb]);
    }
  }

  std::map<long long, BlockInput> blocks;
  {
    auto pb = pools.column("block"), px = pools.column("x"), py = pools.column("y");
    for (const auto& r : pools.rows) {
      BlockInput in;
      in.block = io::parse_integer(r[pb]);
      in.state = {io::parse_number(r[px]), io::parse_number(r[py])};
      if (!(in.state.x > 0.0) || !(in.state.y > 0.0)) throw schema("pool reserves must be positive in block " + r[pb]);
      in.config = PoolConfig::constant_product(k.value_or(in.state.x * in.state.y));
      require_on_curve(in.config.curve_ref(), in.state);
      auto c = candle_by_block.find(in.block);
      if (c == candle_by_block.end()) throw schema("missing candle for block " + r[pb]);
      in.candle = c->second;
      if (!blocks.emplace(in.block, std::move(in)).second) throw schema("duplicate pool state for block " + r[pb]);
    }
  }

  {
    auto ob = orders.column("block"), os = orders.column("side"), oi = orders.column("delta_in"),
         oo = orders.column("delta_out"), ow = orders.column("owner");
    std::optional<std::size_t> orf;
    if (orders.has_column("ref_price")) orf = orders.column("ref_price");
    for (const auto& r : orders.rows) {
      long long b = io::parse_integer(r[ob]);
      auto it = blocks.find(b);
      if (it == blocks.end()) throw schema("order for block " + r[ob] + " has no pool state");
      ReplayOrder ro{b, SwapOrder(io::parse_direction(r[os]), io::parse_number(r[oi]), io::parse_number(r[oo]), r[ow]),
                     std::nullopt};
      if (orf && !r[*orf].empty()) ro.ref_price = io::parse_number(r[*orf]);
      it->second.orders.push_back(std::move(ro));
    }
  }

  std::vector<BlockInput> out;
  for (auto& [b, in] : blocks) out.push_back(std::move(in));
  return out;
}

}  // namespace mevlab
