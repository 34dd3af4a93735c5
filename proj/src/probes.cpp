#include "mevlab/probes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mevlab/error.hpp"
#include "mevlab/io.hpp"
#include "mevlab/parallel.hpp"
#include "mevlab/rng.hpp"

namespace mevlab {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

void require_trials(std::size_t trials) {
  if (trials == 0) throw Error(ErrorCode::InvalidArgument, "trials must be at least 1");
}

struct RunStats {
  std::size_t runs = 0;
  double budget = 0.0;
  double conservation = 0.0;

  void add(const MechanismOutcome& o) {
    ++runs;
    budget = std::max(budget, budget_residual(o));
    conservation = std::max(conservation, conservation_residual(o));
  }
};

SlotInput truthful_slot(const Instance& inst, std::uint64_t seed) {
  SlotInput in;
  in.s0 = inst.s0;
  in.orders = inst.orders;
  in.seed = seed;
  for (std::size_t i = 0; i < inst.beliefs.size(); ++i) in.reports.push_back({static_cast<ArbId>(i), inst.beliefs[i]});
  return in;
}

}  // namespace

json instance_to_json(const Instance& inst) {
  json j;
  j["pool"] = io::pool_to_json(inst.config, inst.s0);
  j["orders"] = json::array();
  for (const SwapOrder& o : inst.orders) j["orders"].push_back(io::order_to_json(o));
  j["beliefs"] = inst.beliefs;
  return j;
}

Instance sample_instance(const InstanceParams& params, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, std::max(lo, hi))(rng);
  };
  auto clamp_price = [&](double p) { return std::clamp(p, params.price_low, params.price_high); };

  Instance inst;
  inst.config = PoolConfig::constant_product(log_uniform(rng, params.k_low, params.k_high), params.fee);
  const double spot = log_uniform(rng, params.price_low, params.price_high);
  inst.s0 = state_at_price(inst.config.curve_ref(), spot);

  const std::size_t m = pick(params.min_orders, params.max_orders);
  for (std::size_t j = 0; j < m; ++j) {
    double p = clamp_price(spot * std::exp(params.order_spread * (2.0 * u(rng) - 1.0)));
    double frac = params.max_order_fraction * std::max(u(rng), 1e-3);
    if (u(rng) < 0.5) {
      double din = inst.s0.x * frac;
      inst.orders.emplace_back(Direction::XtoY, din, din * p, "user" + std::to_string(j));
    } else {
      double din = inst.s0.y * frac;
      inst.orders.emplace_back(Direction::YtoX, din, din / p, "user" + std::to_string(j));
    }
  }
  const std::size_t arbs = pick(params.min_arbs, params.max_arbs);
  for (std::size_t i = 0; i < arbs; ++i) inst.beliefs.push_back(clamp_price(spot * std::exp(params.belief_spread * n(rng))));
  return inst;
}

InstanceSampler make_instance_sampler(InstanceParams params) {
  return [params](std::mt19937_64& rng) { return sample_instance(params, rng); };
}

SybilSampler make_sybil_sampler(SybilParams params) {
  return [params](std::mt19937_64& rng, const Instance& inst) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double spot = inst.config.curve_ref().marginal_rate(inst.s0);
    const std::size_t count =
        std::uniform_int_distribution<std::size_t>(params.min_orders, std::max(params.min_orders, params.max_orders))(rng);
    std::vector<SwapOrder> out;
    for (std::size_t k = 0; k < count; ++k) {
      bool large = u(rng) < params.overpriced_share;
      double size = large ? params.large_size_low + u(rng) * (params.large_size_high - params.large_size_low)
                          : 0.01 + 0.3 * u(rng);
      double price_ratio = large ? params.discount_low + u(rng) * (params.discount_high - params.discount_low)
                                 : std::exp(0.2 * (2.0 * u(rng) - 1.0));
      std::string owner = "sybil" + std::to_string(k);
      if (u(rng) < 0.5) {
        double din = inst.s0.x * size;
        out.emplace_back(Direction::XtoY, din, din * spot * price_ratio, owner);
      } else {
        // A buyer overpays by asking for less risky output per numeraire.
        double din = inst.s0.y * size;
        out.emplace_back(Direction::YtoX, din, din / spot * price_ratio, owner);
      }
    }
    return out;
  };
}

json report_to_json(const ProbeReport& r) {
  json j;
  j["probe"] = r.probe;
  j["mechanism"] = std::string(to_string(r.mechanism));
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["tolerance"] = r.tolerance;
  j["max_violation"] = r.max_violation;
  if (r.probe == "sybil") j["max_abs_difference"] = r.max_abs_difference;
  j["passed"] = r.passed();
  j["mechanism_runs"] = r.mechanism_runs;
  j["max_budget_residual"] = r.max_budget_residual;
  j["max_conservation_residual"] = r.max_conservation_residual;
  j["witness"] = r.witness ? *r.witness : json(nullptr);
  return j;
}

std::vector<double> default_deviation_grid(std::size_t points) {
  if (points < 2) return {1.0};
  std::vector<double> g(points);
  const double lo = std::log(0.5), hi = std::log(2.0);
  for (std::size_t i = 0; i < points; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(points - 1);
    g[i] = std::exp(lo + t * (hi - lo));
  }
  if (points % 2 == 1) g[points / 2] = 1.0;
  return g;
}

ProbeReport truthfulness_probe(MechanismKind mechanism, const InstanceSampler& sampler,
                               std::span<const double> deviation_grid, std::size_t trials, std::uint64_t seed) {
  require_trials(trials);
  struct Trial {
    double gain = -kInf;
    std::optional<json> witness;
    RunStats stats;
  };
  std::vector<Trial> results(trials);
  parallel_for(trials, [&](std::size_t t) {
    std::mt19937_64 rng = substream(seed, t);
    Instance inst = sampler(rng);
    if (inst.beliefs.empty()) return;
    const std::size_t who = std::uniform_int_distribution<std::size_t>(0, inst.beliefs.size() - 1)(rng);
    const ArbId arb = static_cast<ArbId>(who);
    const double truth = inst.beliefs[who];
    SlotInput in = truthful_slot(inst, substream_seed(seed, t + 0x5eed));

    MechanismOutcome base = run_mechanism(mechanism, inst.config, in);
    Trial& r = results[t];
    r.stats.add(base);
    const double u_true = arbitrageur_utility(base, arb, truth);
    for (double f : deviation_grid) {
      in.reports[who].q = truth * f;
      MechanismOutcome dev = run_mechanism(mechanism, inst.config, in);
      r.stats.add(dev);
      double gain = arbitrageur_utility(dev, arb, truth) - u_true;
      if (gain > r.gain) {
        r.gain = gain;
        r.witness = json{{"trial", t},
                         {"instance", instance_to_json(inst)},
                         {"arb", arb},
                         {"true_belief", truth},
                         {"report", truth * f},
                         {"utility_truthful", u_true},
                         {"utility_deviated", u_true + gain}};
      }
    }
  });

  ProbeReport rep;
  rep.probe = "truthfulness";
  rep.mechanism = mechanism;
  rep.trials = trials;
  rep.seed = seed;
  rep.max_violation = -kInf;
  for (Trial& r : results) {
    rep.max_abs_difference = std::max(rep.max_abs_difference, std::fabs(r.gain == -kInf ? 0.0 : r.gain));
    rep.mechanism_runs += r.stats.runs;
    rep.max_budget_residual = std::max(rep.max_budget_residual, r.stats.budget);
    rep.max_conservation_residual = std::max(rep.max_conservation_residual, r.stats.conservation);
    if (r.gain > rep.max_violation) {
      rep.max_violation = r.gain;
      if (r.gain > rep.tolerance) rep.witness = r.witness;
    }
  }
  if (rep.max_violation == -kInf) rep.max_violation = 0.0;
  return rep;
}

ProbeReport sybil_probe(MechanismKind mechanism, const InstanceSampler& sampler, const SybilSampler& sybils,
                        std::size_t trials, std::uint64_t seed) {
  require_trials(trials);
  struct Trial {
    double drop = 0.0;
    double abs_diff = 0.0;
    std::optional<json> witness;
    RunStats stats;
  };
  std::vector<Trial> results(trials);
  parallel_for(trials, [&](std::size_t t) {
    std::mt19937_64 rng = substream(seed, t);
    Instance inst = sampler(rng);
    std::vector<SwapOrder> fake = sybils ? sybils(rng, inst) : std::vector<SwapOrder>{};
    if (fake.empty() || inst.beliefs.empty()) return;
    SlotInput without = truthful_slot(inst, substream_seed(seed, t + 0x5eed));
    SlotInput with = without;
    with.orders.insert(with.orders.end(), fake.begin(), fake.end());

    MechanismOutcome a = run_mechanism(mechanism, inst.config, without);
    MechanismOutcome b = run_mechanism(mechanism, inst.config, with);
    Trial& r = results[t];
    r.stats.add(a);
    r.stats.add(b);
    for (std::size_t j = 0; j < inst.orders.size(); ++j) {
      double ua = user_utility(a, j), ub = user_utility(b, j);
      r.abs_diff = std::max(r.abs_diff, std::fabs(ub - ua));
      if (ua - ub > r.drop) {
        r.drop = ua - ub;
        json sy = json::array();
        for (const SwapOrder& o : fake) sy.push_back(io::order_to_json(o));
        r.witness = json{{"trial", t},
                         {"instance", instance_to_json(inst)},
                         {"sybil_orders", sy},
                         {"order", j},
                         {"utility_without", ua},
                         {"utility_with", ub}};
      }
    }
  });

  ProbeReport rep;
  rep.probe = "sybil";
  rep.mechanism = mechanism;
  rep.trials = trials;
  rep.seed = seed;
  for (Trial& r : results) {
    rep.mechanism_runs += r.stats.runs;
    rep.max_budget_residual = std::max(rep.max_budget_residual, r.stats.budget);
    rep.max_conservation_residual = std::max(rep.max_conservation_residual, r.stats.conservation);
    rep.max_abs_difference = std::max(rep.max_abs_difference, r.abs_diff);
    if (r.drop > rep.max_violation) {
      rep.max_violation = r.drop;
      rep.witness = r.witness;
    }
  }
  if (!(rep.max_violation > rep.tolerance)) rep.witness.reset();
  return rep;
}

// ---------------------------------------------------------------------------
// Sybil profit

std::vector<SwapOrder> SybilStrategy::orders(const ArbitrageurProfile& profile, const std::string& owner) const {
  std::vector<SwapOrder> out;
  if (t_sell) out.emplace_back(Direction::XtoY, profile.budget_x, *t_sell, owner);
  if (t_buy) out.emplace_back(Direction::YtoX, profile.budget_y, *t_buy, owner);
  return out;
}

namespace {

// Competitor order statistics that decide a Sybil leg: for the selling leg
// the two highest beliefs, for the buying leg the two lowest.
struct Contest {
  double best;
  double runner;  // -inf / +inf when absent
};

Contest contest(Direction leg, std::span<const double> others) {
  if (leg == Direction::XtoY) {
    Contest c{-kInf, -kInf};
    for (double v : others) {
      if (v > c.best) {
        c.runner = c.best;
        c.best = v;
      } else if (v > c.runner) {
        c.runner = v;
      }
    }
    return c;
  }
  Contest c{kInf, kInf};
  for (double v : others) {
    if (v < c.best) {
      c.runner = c.best;
      c.best = v;
    } else if (v < c.runner) {
      c.runner = v;
    }
  }
  return c;
}

// Values are computed exactly as the mechanism computes them: dx*q + dy.
inline double leg_profit(Direction leg, double budget, double belief, double report, double t, Contest c) {
  if (leg == Direction::XtoY) {
    if (c.best == -kInf) return 0.0;
    const double mine = budget * report + -t;
    const double top = budget * c.best + -t;
    if (mine > top || top < 0.0) return 0.0;
    double refund = std::max(0.0, mine);
    if (c.runner != -kInf) refund = std::max(refund, budget * c.runner + -t);
    return (t - budget * belief) + refund;
  }
  if (c.best == kInf) return 0.0;
  const double mine = -t * report + budget;
  const double top = -t * c.best + budget;
  if (mine > top || top < 0.0) return 0.0;
  double refund = std::max(0.0, mine);
  if (c.runner != kInf) refund = std::max(refund, -t * c.runner + budget);
  return (t * belief - budget) + refund;
}

double leg_budget(const ArbitrageurProfile& p, Direction leg) { return leg == Direction::XtoY ? p.budget_x : p.budget_y; }

}  // namespace

double sybil_leg_profit(const ArbitrageurProfile& profile, Direction leg, double report, double t_out,
                          std::span<const double> other_beliefs) {
  if (!(t_out > 0.0)) throw Error(ErrorCode::InvalidArgument, "asked output must be positive");
  double b = leg_budget(profile, leg);
  if (!(b > 0.0)) return 0.0;
  return leg_profit(leg, b, profile.belief, report, t_out, contest(leg, other_beliefs));
}

double sybil_profit_measured(const PoolConfig& config, PoolState s0, std::span<const SwapOrder> real_orders,
                             const ArbitrageurProfile& profile, ArbId self, Direction leg, double report,
                             double t_out, std::span<const ArbitrageurReport> others) {
  SlotInput in;
  in.s0 = s0;
  in.orders.assign(real_orders.begin(), real_orders.end());
  in.reports.assign(others.begin(), others.end());
  in.reports.push_back({self, report});
  MechanismOutcome without = rediswap_run(config, in);
  double u0 = arbitrageur_utility(without, self, profile.belief);

  in.orders.emplace_back(leg, leg_budget(profile, leg), t_out, "sybil");
  MechanismOutcome with = rediswap_run(config, in);
  std::size_t idx[] = {in.orders.size() - 1};
  return arbitrageur_utility(with, self, profile.belief, idx) - u0;
}

std::vector<std::vector<double>> competitor_samples(std::span<const BeliefDistribution> priors, std::size_t mc_samples,
                                                    std::uint64_t seed) {
  for (const auto& p : priors) {
    try {
      p.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidPrior, e.what());
    }
  }
  std::vector<std::vector<double>> out(mc_samples, std::vector<double>(priors.size()));
  for (std::size_t s = 0; s < mc_samples; ++s) {
    std::mt19937_64 rng = substream(seed, s);
    for (std::size_t k = 0; k < priors.size(); ++k) out[s][k] = priors[k].sample(rng);
  }
  return out;
}

double expected_sybil_profit(const ArbitrageurProfile& profile, Direction leg, double report, double t_out,
                             const std::vector<std::vector<double>>& samples) {
  if (samples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : samples) total += sybil_leg_profit(profile, leg, report, t_out, s);
  return total / static_cast<double>(samples.size());
}

namespace {

struct LegChoice {
  std::optional<double> t;
  double value = 0.0;
};

LegChoice optimize_leg(const ArbitrageurProfile& p, Direction leg, std::span<const BeliefDistribution> priors,
                       const std::vector<std::vector<double>>& samples, std::size_t grid_n) {
  const double b = leg_budget(p, leg);
  if (!(b > 0.0) || priors.empty()) return {};
  double lo, hi;
  if (leg == Direction::XtoY) {
    double q_max = 0.0;
    for (const auto& d : priors) q_max = std::max(q_max, d.high);
    if (!(q_max > p.belief)) return {};
    lo = b * p.belief;
    hi = b * q_max;
  } else {
    double q_min = kInf;
    for (const auto& d : priors) q_min = std::min(q_min, d.low);
    if (!(q_min < p.belief)) return {};
    lo = b / p.belief;
    hi = b / q_min;
  }

  std::vector<Contest> cs;
  cs.reserve(samples.size());
  for (const auto& s : samples) cs.push_back(contest(leg, s));

  std::vector<double> cand;
  cand.reserve(grid_n + cs.size());
  for (std::size_t g = 0; g < grid_n; ++g) {
    double f = static_cast<double>(g) / static_cast<double>(grid_n - 1);
    cand.push_back(lo * std::pow(hi / lo, f));
  }
  cand.front() = lo;
  cand.back() = hi;
  // The expected profit is piecewise linear in the ask and only drops where
  // some competitor stops being willing to take the order.
  for (const Contest& c : cs) {
    double t = leg == Direction::XtoY ? b * c.best : b / c.best;
    if (t >= lo && t <= hi) cand.push_back(t);
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  LegChoice best{std::nullopt, -kInf};
  const double n = static_cast<double>(cs.size());
  for (double t : cand) {
    double total = 0.0;
    for (const Contest& c : cs) total += leg_profit(leg, b, p.belief, p.belief, t, c);
    double mean = total / n;
    if (mean > best.value) best = {t, mean};
  }
  if (!(best.value > 0.0)) return {};
  return best;
}

}  // namespace

SybilStrategy optimize_sybil(const ArbitrageurProfile& profile, std::span<const BeliefDistribution> competitor_priors,
                             std::size_t grid_n, std::size_t mc_samples, std::uint64_t seed) {
  if (grid_n < 2) throw Error(ErrorCode::InvalidArgument, "grid_n must be at least 2");
  if (mc_samples < 1) throw Error(ErrorCode::InvalidArgument, "mc_samples must be at least 1");
  if (!(profile.belief > 0.0)) throw Error(ErrorCode::InvalidPrice, "belief must be positive");
  if (!(profile.budget_x >= 0.0) || !(profile.budget_y >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "budgets must be non-negative");
  }
  SybilStrategy s;
  if (competitor_priors.empty()) return s;
  auto samples = competitor_samples(competitor_priors, mc_samples, seed);
  LegChoice sell = optimize_leg(profile, Direction::XtoY, competitor_priors, samples, grid_n);
  LegChoice buy = optimize_leg(profile, Direction::YtoX, competitor_priors, samples, grid_n);
  s.t_sell = sell.t;
  s.expected_sell = sell.t ? sell.value : 0.0;
  s.t_buy = buy.t;
  s.expected_buy = buy.t ? buy.value : 0.0;
  return s;
}

// ---------------------------------------------------------------------------
// Equilibrium check

json report_to_json(const NashReport& r) {
  json j;
  j["probe"] = "ne";
  j["max_violation"] = r.max_excess;
  j["passed"] = r.passed();
  j["mechanism_runs"] = r.mechanism_runs;
  j["max_budget_residual"] = r.max_budget_residual;
  j["max_conservation_residual"] = r.max_conservation_residual;
  j["equilibrium_utility"] = r.equilibrium_utility;
  json eq = json::array();
  for (const SybilStrategy& s : r.equilibrium) {
    eq.push_back({{"t_sell", s.t_sell ? json(*s.t_sell) : json(nullptr)},
                  {"t_buy", s.t_buy ? json(*s.t_buy) : json(nullptr)},
                  {"expected_sell", s.expected_sell},
                  {"expected_buy", s.expected_buy}});
  }
  j["equilibrium"] = eq;
  const DeviationRow* worst = nullptr;
  for (const DeviationRow& d : r.rows)
    if (!worst || d.mean_gain - d.std_error * 2.0 > worst->mean_gain - worst->std_error * 2.0) worst = &d;
  if (worst) {
    j["worst_deviation"] = {{"belief", worst->belief},
                            {"report", worst->report},
                            {"t_sell", worst->t_sell ? json(*worst->t_sell) : json(nullptr)},
                            {"t_buy", worst->t_buy ? json(*worst->t_buy) : json(nullptr)},
                            {"mean_gain", worst->mean_gain},
                            {"std_error", worst->std_error}};
  }
  j["deviations"] = r.rows.size();
  j["witness"] = r.passed() ? json(nullptr) : j["worst_deviation"];
  return j;
}

NashReport nash_check(const NashConfig& cfg) {
  const std::size_t n = cfg.priors.size();
  if (n < 1) throw Error(ErrorCode::InvalidPrior, "need at least one prior");
  if (cfg.deviator < 0 || static_cast<std::size_t>(cfg.deviator) >= n) {
    throw Error(ErrorCode::UnknownArbitrageur, "deviator out of range");
  }
  if (cfg.mc_samples < 2) throw Error(ErrorCode::InvalidArgument, "mc_samples must be at least 2");
  const std::size_t dev = static_cast<std::size_t>(cfg.deviator);
  const double bx = cfg.budget_fraction * cfg.s0.x;
  const double by = cfg.budget_fraction * cfg.s0.y;

  auto priors_except = [&](std::size_t who) {
    std::vector<BeliefDistribution> out;
    for (std::size_t k = 0; k < n; ++k)
      if (k != who) out.push_back(cfg.priors[k]);
    return out;
  };
  auto profile = [&](std::size_t who, double belief) {
    return ArbitrageurProfile{belief, bx, by, cfg.priors[who]};
  };
  auto seed_of = [&](std::size_t who) { return substream_seed(cfg.seed, 1000 + who); };

  // Competitor beliefs, shared with the deviator's optimizer.
  const auto dev_priors = priors_except(dev);
  const auto samples = competitor_samples(dev_priors, cfg.mc_samples, seed_of(dev));
  std::vector<std::size_t> competitors;
  for (std::size_t k = 0; k < n; ++k)
    if (k != dev) competitors.push_back(k);

  // Competitors' own equilibrium Sybils, one per sample.
  std::vector<std::vector<SwapOrder>> comp_orders(cfg.mc_samples);
  parallel_for(cfg.mc_samples, [&](std::size_t s) {
    for (std::size_t c = 0; c < competitors.size(); ++c) {
      std::size_t k = competitors[c];
      ArbitrageurProfile pk = profile(k, samples[s][c]);
      SybilStrategy sk = optimize_sybil(pk, priors_except(k), cfg.grid_n, cfg.mc_samples, seed_of(k));
      for (SwapOrder& o : sk.orders(pk, "sybil-of-" + std::to_string(k))) comp_orders[s].push_back(std::move(o));
    }
  });

  NashReport rep;
  rep.max_excess = -kInf;
  std::vector<RunStats> stats(cfg.mc_samples);

  auto utility = [&](std::size_t s, double belief, double report, const std::vector<SwapOrder>& own) {
    SlotInput in;
    in.s0 = cfg.s0;
    in.seed = s;
    in.orders = cfg.orders;
    in.orders.insert(in.orders.end(), comp_orders[s].begin(), comp_orders[s].end());
    std::vector<std::size_t> mine;
    for (const SwapOrder& o : own) {
      mine.push_back(in.orders.size());
      in.orders.push_back(o);
    }
    for (std::size_t c = 0; c < competitors.size(); ++c) {
      in.reports.push_back({static_cast<ArbId>(competitors[c]), samples[s][c]});
    }
    in.reports.push_back({static_cast<ArbId>(dev), report});
    MechanismOutcome out = rediswap_run(cfg.config, in);
    stats[s].add(out);
    return arbitrageur_utility(out, static_cast<ArbId>(dev), belief, mine);
  };

  for (double qtl : cfg.deviator_quantiles) {
    const double belief = cfg.priors[dev].quantile(qtl);
    const ArbitrageurProfile me = profile(dev, belief);
    const SybilStrategy eq = optimize_sybil(me, dev_priors, cfg.grid_n, cfg.mc_samples, seed_of(dev));
    rep.equilibrium.push_back(eq);
    const auto eq_orders = eq.orders(me, "sybil-of-" + std::to_string(dev));

    std::vector<double> u_eq(cfg.mc_samples);
    parallel_for(cfg.mc_samples, [&](std::size_t s) { u_eq[s] = utility(s, belief, belief, eq_orders); });
    rep.equilibrium_utility.push_back(std::accumulate(u_eq.begin(), u_eq.end(), 0.0) /
                                      static_cast<double>(cfg.mc_samples));

    // Ask grids span the same ranges the optimizer searches, plus "no leg"
    // and the equilibrium ask itself.
    double q_max = 0.0, q_min = kInf;
    for (const auto& d : dev_priors) q_max = std::max(q_max, d.high), q_min = std::min(q_min, d.low);
    std::vector<std::optional<double>> sells{std::nullopt}, buys{std::nullopt};
    if (eq.t_sell) sells.push_back(eq.t_sell);
    if (eq.t_buy) buys.push_back(eq.t_buy);
    for (std::size_t g = 0; g < cfg.t_points; ++g) {
      double f = cfg.t_points == 1 ? 0.5 : static_cast<double>(g) / static_cast<double>(cfg.t_points - 1);
      double lo_s = bx * belief * 0.9, hi_s = bx * std::max(q_max, belief);
      double lo_b = by / (belief * 1.1), hi_b = by / std::min(q_min, belief);
      if (bx > 0.0) sells.push_back(lo_s + f * (hi_s - lo_s));
      if (by > 0.0) buys.push_back(lo_b + f * (hi_b - lo_b));
    }

    for (double factor : cfg.report_factors) {
      for (const auto& ts : sells) {
        for (const auto& tb : buys) {
          SybilStrategy d;
          d.t_sell = ts;
          d.t_buy = tb;
          const auto own = d.orders(me, "sybil-of-" + std::to_string(dev));
          const double report = belief * factor;
          std::vector<double> gain(cfg.mc_samples);
          parallel_for(cfg.mc_samples, [&](std::size_t s) { gain[s] = utility(s, belief, report, own) - u_eq[s]; });
          const double m = static_cast<double>(cfg.mc_samples);
          double mean = std::accumulate(gain.begin(), gain.end(), 0.0) / m;
          double ss = 0.0;
          for (double g : gain) ss += (g - mean) * (g - mean);
          double se = std::sqrt(ss / (m - 1.0)) / std::sqrt(m);
          rep.rows.push_back({belief, report, ts, tb, mean, se});
          double slack = 1e-9 * (1.0 + std::fabs(rep.equilibrium_utility.back()));
          rep.max_excess = std::max(rep.max_excess, mean - cfg.z * se - slack);
        }
      }
    }
  }
  for (const RunStats& s : stats) {
    rep.mechanism_runs += s.runs;
    rep.max_budget_residual = std::max(rep.max_budget_residual, s.budget);
    rep.max_conservation_residual = std::max(rep.max_conservation_residual, s.conservation);
  }
  return rep;
}

}  // namespace mevlab
