#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "mevlab/error.hpp"
#include "mevlab/io.hpp"
#include "mevlab/optimal_mev.hpp"
#include "mevlab/probes.hpp"
#include "mevlab/replay.hpp"
#include "mevlab/valuation.hpp"

namespace mevlab::cli {

using nlohmann::json;

bool GoldenCheck::ok() const {
  return std::fabs(actual - expected) <= tolerance * std::max({1.0, std::fabs(expected), std::fabs(actual)});
}

bool DemoResult::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const GoldenCheck& c) { return c.ok(); });
}

namespace {

// Raised for bad flags or unreadable inputs: exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<SwapOrder> example_orders() {
  return {SwapOrder(Direction::XtoY, 8.0, 25.0, "tx1"), SwapOrder(Direction::XtoY, 30.0, 12.0, "tx2"),
          SwapOrder(Direction::YtoX, 20.0, 10.0, "tx3")};
}

json state_json(PoolState s) { return io::state_to_json(s); }

}  // namespace

DemoResult run_demo(const DemoParams& params) {
  DemoResult r;
  auto check = [&](std::string name, double expected, double actual) {
    r.checks.push_back({std::move(name), expected, actual, 1e-9});
  };
  const PoolConfig config = PoolConfig::constant_product(params.k);
  const TradingCurve& curve = config.curve_ref();
  const PoolState s0{4.0, curve.y_given_x(4.0)};
  const std::vector<SwapOrder> orders = example_orders();
  const double v = 4.0;

  // Single arbitrageur with belief 4.
  Bundle best = optimal_bundle(config, s0, orders, v);
  const double mev = bundle_profit(config, best, v);
  check("optimal_bundle.optimal_mev", 151.0, mev);
  check("optimal_bundle.closed_form_mev", 151.0, optimal_profit(config, s0, orders, v));
  check("optimal_bundle.potential", 36.0, potential(curve, s0, v));
  const double values[] = {7.0, 108.0, 0.0};
  const PoolState limits[] = {{8.0, 50.0}, {20.0, 20.0}, {20.0, 20.0}};
  json ex1 = {{"optimal_mev", mev}, {"potential", potential(curve, s0, v)}, {"orders", json::array()}};
  for (std::size_t j = 0; j < orders.size(); ++j) {
    const std::string tag = "optimal_bundle.tx" + std::to_string(j + 1);
    const double value = tx_value(orders[j], v);
    const PoolState ls = limit_state(curve, orders[j]);
    check(tag + ".value", values[j], value);
    check(tag + ".limit_x", limits[j].x, ls.x);
    check(tag + ".limit_y", limits[j].y, ls.y);
    ex1["orders"].push_back({{"order", io::order_to_json(orders[j])}, {"value", value}, {"limit_state", state_json(ls)}});
  }
  r.details["optimal_bundle"] = ex1;

  // Two arbitrageurs, beliefs 4 and 1; strawman with and without a Sybil order.
  SlotInput slot;
  slot.s0 = s0;
  slot.orders = orders;
  slot.reports = {{1, 4.0}, {2, 1.0}};
  slot.seed = 7;
  MechanismOutcome straw = strawman_run(config, slot);
  const double winner = straw.audit.at(0).winner ? *straw.audit[0].winner : -1.0;
  check("strawman.winner", 1.0, winner);
  check("strawman.payment", 92.0, straw.payment_of(1));
  check("strawman.arb1_utility", 59.0, arbitrageur_utility(straw, 1, 4.0));
  const double user_expected[] = {25.0 + 7.0 / 151.0 * 92.0, 12.0 + 108.0 / 151.0 * 92.0, 20.0};
  for (std::size_t j = 0; j < orders.size(); ++j) {
    check("strawman.tx" + std::to_string(j + 1) + ".user_utility", user_expected[j], user_utility(straw, j));
  }
  SlotInput attacked = slot;
  attacked.orders.emplace_back(Direction::XtoY, 260.0, 271.0, "tx4-sybil");
  MechanismOutcome straw_sybil = strawman_run(config, attacked);
  const std::size_t tx4[] = {3};
  const double sybil_utility = arbitrageur_utility(straw_sybil, 1, 4.0, tx4);
  check("strawman.arb1_utility_with_sybil", 59.0 + 769.0 / 920.0 * 92.0, sybil_utility);
  r.details["strawman"] = {{"without_sybil", io::outcome_to_json(straw)},
                           {"with_sybil", io::outcome_to_json(straw_sybil)},
                           {"arb1_utility_with_sybil", sybil_utility}};

  // Same slot under per-order auctions.
  MechanismOutcome redi = rediswap_run(config, slot);
  check("rediswap.payment_arb1", 18.0, redi.payment_of(1));
  check("rediswap.payment_arb2", 36.0, redi.payment_of(2));
  check("rediswap.refund_tx2", 18.0, redi.refunds.at(1));
  check("rediswap.lp_refund", 36.0, redi.lp_refund);
  std::size_t sandwiches = 0, back_to_start = 0, rebalances = 0;
  for (std::size_t i = 0; i < redi.bundle.steps.size(); ++i) {
    const Role role = redi.bundle.steps[i].origin.role;
    if (role == Role::Front) ++sandwiches;
    if (role == Role::Rebalance) ++rebalances;
    if (role == Role::Back && approx_equal(redi.trace.states[i + 1], s0)) ++back_to_start;
  }
  check("rediswap.sandwiches", 3.0, static_cast<double>(sandwiches));
  check("rediswap.sandwiches_back_to_s0", 3.0, static_cast<double>(back_to_start));
  check("rediswap.rebalances", 1.0, static_cast<double>(rebalances));
  check("rediswap.final_x", 20.0, redi.final_state().x);
  check("rediswap.final_y", 20.0, redi.final_state().y);
  r.details["rediswap"] = io::outcome_to_json(redi);
  return r;
}

namespace {

void print_demo_text(std::ostream& out, const DemoResult& r) {
  const json& e1 = r.details["optimal_bundle"];
  out << "Optimal bundle: one arbitrageur, belief 4\n";
  out << "  optimal MEV = " << e1["optimal_mev"].get<double>() << "\n";
  out << "  potential at s0 = " << e1["potential"].get<double>() << "\n";
  for (const json& o : e1["orders"]) {
    out << "  " << o["order"]["owner"].get<std::string>() << ": value " << o["value"].get<double>()
        << ", limit state (" << o["limit_state"][0].get<double>() << ", " << o["limit_state"][1].get<double>()
        << ")\n";
  }
  auto table = [&](const json& outcome) {
    out << "  " << std::left << std::setw(10) << "arb" << "payment\n";
    for (const json& p : outcome["payments"])
      out << "  " << std::setw(10) << p["arb"].get<int>() << p["amount"].get<double>() << "\n";
    out << "  " << std::setw(10) << "order" << std::setw(12) << "refund" << "user utility\n";
    for (std::size_t k = 0; k < outcome["fills"].size(); ++k) {
      const json& refund = outcome["refunds"][k];
      out << "  " << std::setw(10) << refund["owner"].get<std::string>() << std::setw(12)
          << refund["amount"].get<double>() << outcome["fills"][k]["user_utility"].get<double>() << "\n";
    }
    out << "  LP refund " << outcome["lp_refund"].get<double>() << "\n";
  };
  out << "Strawman: one auction for the whole slot\n";
  table(r.details["strawman"]["without_sybil"]);
  out << "  arb 1 utility with Sybil order = " << r.details["strawman"]["arb1_utility_with_sybil"].get<double>()
      << "\n";
  out << "Rediswap: one auction per order and one for the initial state\n";
  table(r.details["rediswap"]);
  out << "Checks\n";
  for (const GoldenCheck& c : r.checks) {
    out << "  [" << (c.ok() ? "ok" : "FAIL") << "] " << c.name << ": expected " << c.expected << ", got "
        << c.actual << "\n";
  }
}

json checks_json(const DemoResult& r) {
  json a = json::array();
  for (const GoldenCheck& c : r.checks)
    a.push_back({{"name", c.name}, {"expected", c.expected}, {"actual", c.actual}, {"ok", c.ok()}});
  return a;
}

int demo_command(const GlobalOptions& g, const DemoParams& p, std::ostream& out) {
  DemoResult r = run_demo(p);
  if (!g.quiet) {
    if (g.output == OutputFormat::Text) {
      print_demo_text(out, r);
    } else if (g.output == OutputFormat::Json) {
      out << json{{"ok", r.ok()}, {"checks", checks_json(r)}, {"examples", r.details}}.dump(2) << "\n";
    } else if (g.output == OutputFormat::Csv) {
      out << "name,expected,actual,ok\n";
      for (const GoldenCheck& c : r.checks)
        out << c.name << ',' << io::format_number(c.expected) << ',' << io::format_number(c.actual) << ','
            << (c.ok() ? "true" : "false") << "\n";
    }
  }
  return r.ok() ? kOk : kDomainFailure;
}

json load_json(const std::string& path) {
  try {
    return io::read_json_file(path);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

struct MechanismArgs {
  std::string path;
  std::string mech = "rediswap";
};

int mechanism_command(const GlobalOptions& g, const MechanismArgs& a, std::ostream& out) {
  io::SlotFile slot;
  try {
    slot = io::slot_from_json(load_json(a.path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Schema) throw UsageError(e.what());
    throw;
  }
  if (g.seed_given) slot.input.seed = g.seed;
  MechanismOutcome outcome = run_mechanism(parse_mechanism(a.mech), slot.config, slot.input);
  if (g.quiet) return kOk;
  if (g.output == OutputFormat::Json) {
    out << io::outcome_to_json(outcome).dump(2) << "\n";
  } else {
    using io::format_number;
    out << "step,role,direction,amount_in,amount_out,arb,order,post_x,post_y\n";
    for (std::size_t i = 0; i < outcome.bundle.steps.size(); ++i) {
      const SwapStep& s = outcome.bundle.steps[i];
      const PoolState post = outcome.trace.states[i + 1];
      out << i << ',' << to_string(s.origin.role) << ',' << to_string(s.direction) << ','
          << format_number(s.amount_in) << ',' << format_number(s.amount_out) << ',';
      if (s.origin.role != Role::User) out << s.origin.arb;
      out << ',';
      if (s.origin.order) out << *s.origin.order;
      out << ',' << format_number(post.x) << ',' << format_number(post.y) << "\n";
    }
  }
  return kOk;
}

struct ProbeArgs {
  std::string probe = "truthfulness";
  std::string mech = "rediswap";
  std::size_t trials = 500;
  std::size_t grid_points = 21;
  // Equilibrium check.
  std::size_t arbs = 2;
  double prior_low = 0.8;
  double prior_high = 1.2;
  double budget = 0.1;
  std::size_t mc = 2000;
  std::size_t grid = 128;
  double k = 1e4;
  double price = 1.0;
};

int probe_command(const GlobalOptions& g, const ProbeArgs& a, std::ostream& out) {
  json report;
  bool passed = false;
  if (a.probe == "ne") {
    NashConfig cfg;
    cfg.config = PoolConfig::constant_product(a.k);
    cfg.s0 = state_at_price(cfg.config.curve_ref(), a.price);
    cfg.priors.assign(a.arbs, BeliefDistribution::uniform(a.prior_low, a.prior_high));
    cfg.budget_fraction = a.budget;
    cfg.mc_samples = a.mc;
    cfg.grid_n = a.grid;
    cfg.seed = g.seed;
    NashReport r = nash_check(cfg);
    report = report_to_json(r);
    report["seed"] = g.seed;
    passed = r.passed();
  } else {
    const MechanismKind mech = parse_mechanism(a.mech);
    ProbeReport r;
    if (a.probe == "truthfulness") {
      auto grid = default_deviation_grid(a.grid_points);
      r = truthfulness_probe(mech, make_instance_sampler(), grid, a.trials, g.seed);
    } else {
      r = sybil_probe(mech, make_instance_sampler(), make_sybil_sampler(), a.trials, g.seed);
    }
    report = report_to_json(r);
    passed = r.passed();
  }
  if (!g.quiet) {
    if (g.output == OutputFormat::Json) {
      out << report.dump(2) << "\n";
    } else {
      out << "probe,mechanism,trials,seed,max_violation,passed\n";
      out << report.value("probe", "") << ',' << report.value("mechanism", "rediswap") << ','
          << report.value("trials", json(0)).dump() << ',' << g.seed << ','
          << io::format_number(report["max_violation"].get<double>())
          << ',' << (passed ? "true" : "false") << "\n";
    }
  }
  return passed ? kOk : kDomainFailure;
}

struct ReplayArgs {
  std::string orders, candles, pools, config;
  std::size_t synthetic = 0;
  std::size_t n_arbs = 0;
  std::string dist;
  double sigma = -1.0;
  double alpha = 0.0;
  std::vector<double> fees;
  double priority_fee = -1.0;
  std::string baseline;
  double k = 0.0;
  std::string out_dir;
};

ReplayConfig replay_config(const GlobalOptions& g, const ReplayArgs& a, std::optional<double>& k) {
  ReplayConfig cfg;
  if (!a.config.empty()) {
    json j = load_json(a.config);
    try {
      cfg.n_arbs = j.value("n_arbs", cfg.n_arbs);
      if (j.contains("belief")) cfg.belief = parse_belief_kind(j["belief"].get<std::string>());
      cfg.sigma_rel = j.value("sigma_rel", cfg.sigma_rel);
      cfg.pareto_alpha = j.value("pareto_alpha", cfg.pareto_alpha);
      if (j.contains("fees")) cfg.fees = j["fees"].get<std::vector<double>>();
      cfg.priority_fee = j.value("priority_fee", cfg.priority_fee);
      if (j.contains("baseline")) cfg.baseline = parse_baseline(j["baseline"].get<std::string>());
      cfg.seed = j.value("seed", cfg.seed);
      if (j.contains("k")) k = j["k"].get<double>();
    } catch (const json::exception& e) {
      throw UsageError(std::string("config: ") + e.what());
    } catch (const Error& e) {
      throw UsageError(std::string("config: ") + e.what());
    }
  }
  if (a.n_arbs) cfg.n_arbs = a.n_arbs;
  if (!a.dist.empty()) cfg.belief = parse_belief_kind(a.dist);
  if (a.sigma >= 0.0) cfg.sigma_rel = a.sigma;
  if (a.alpha > 0.0) cfg.pareto_alpha = a.alpha;
  if (!a.fees.empty()) cfg.fees = a.fees;
  if (a.priority_fee >= 0.0) cfg.priority_fee = a.priority_fee;
  if (!a.baseline.empty()) cfg.baseline = parse_baseline(a.baseline);
  if (g.seed_given) cfg.seed = g.seed;
  if (a.k > 0.0) k = a.k;
  return cfg;
}

int replay_command(const GlobalOptions& g, const ReplayArgs& a, std::ostream& out) {
  std::optional<double> k;
  ReplayConfig cfg;
  try {
    cfg = replay_config(g, a, k);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  std::vector<BlockInput> blocks;
  if (a.synthetic > 0) {
    SyntheticParams params;
    params.blocks = a.synthetic;
    params.seed = cfg.seed;
    if (k) params.k = *k;
    blocks = synthetic_blocks(params);
  } else {
    if (a.orders.empty() || a.candles.empty() || a.pools.empty()) {
      throw UsageError("replay needs --orders, --candles and --pools, or --synthetic N");
    }
    try {
      blocks = load_blocks(a.orders, a.candles, a.pools, k);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  std::vector<BlockMetrics> metrics = replay(cfg, blocks);
  Summary summary = aggregate(metrics);
  json sj = summary_to_json(summary);
  sj["n_arbs"] = cfg.n_arbs;
  sj["belief"] = std::string(to_string(cfg.belief));
  sj["baseline"] = std::string(to_string(cfg.baseline));
  sj["seed"] = cfg.seed;

  if (!a.out_dir.empty()) {
    std::filesystem::create_directories(a.out_dir);
    std::ofstream m(std::filesystem::path(a.out_dir) / "metrics.csv");
    std::ofstream s(std::filesystem::path(a.out_dir) / "summary.json");
    if (!m || !s) throw UsageError("cannot write to " + a.out_dir);
    write_metrics_csv(m, metrics);
    s << sj.dump(2) << "\n";
  }
  if (!g.quiet) {
    if (g.output == OutputFormat::Json) out << sj.dump(2) << "\n";
    else write_metrics_csv(out, metrics);
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulate MEV redistribution auctions on a constant-product pool"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  GlobalOptions g;
  std::string output;
  app.add_option("--seed", g.seed, "Random seed")->each([&](const std::string&) { g.seed_given = true; });
  app.add_option("--output", output, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--quiet", g.quiet, "Print nothing; report through the exit code only");

  DemoParams demo;
  auto* demo_cmd = app.add_subcommand("demo", "Run the three worked examples and check the golden values");
  demo_cmd->add_option("--k", demo.k, "Pool invariant; anything but 400 should fail the checks")
      ->check(CLI::PositiveNumber);

  MechanismArgs mech;
  auto* mech_cmd = app.add_subcommand("mechanism", "Run one auction on a slot input file");
  mech_cmd->add_option("slot", mech.path, "Slot input JSON")->required();
  mech_cmd->add_option("--mech", mech.mech, "Mechanism")->check(CLI::IsMember({"strawman", "rediswap"}));

  ProbeArgs probe;
  auto* probe_cmd = app.add_subcommand("probe", "Search for incentive violations");
  probe_cmd->add_option("--probe", probe.probe, "Which property to probe")
      ->check(CLI::IsMember({"truthfulness", "sybil", "ne"}));
  probe_cmd->add_option("--mech", probe.mech, "Mechanism")->check(CLI::IsMember({"strawman", "rediswap"}));
  probe_cmd->add_option("--trials", probe.trials, "Random instances")->check(CLI::PositiveNumber);
  probe_cmd->add_option("--grid-points", probe.grid_points, "Report deviation factors in [0.5, 2]")
      ->check(CLI::Range(std::size_t{1}, std::size_t{10001}));
  probe_cmd->add_option("--arbs", probe.arbs, "Arbitrageurs in the equilibrium check")
      ->check(CLI::Range(std::size_t{2}, std::size_t{16}));
  probe_cmd->add_option("--prior-low", probe.prior_low, "Lower end of the uniform belief prior")
      ->check(CLI::PositiveNumber);
  probe_cmd->add_option("--prior-high", probe.prior_high, "Upper end of the uniform belief prior")
      ->check(CLI::PositiveNumber);
  probe_cmd->add_option("--budget", probe.budget, "Sybil budget as a fraction of reserves")
      ->check(CLI::Range(0.0, 10.0));
  probe_cmd->add_option("--mc", probe.mc, "Monte Carlo samples")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));
  probe_cmd->add_option("--grid", probe.grid, "Sybil ask grid size")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  probe_cmd->add_option("--k", probe.k, "Pool invariant for the equilibrium check")->check(CLI::PositiveNumber);
  probe_cmd->add_option("--price", probe.price, "Pool price for the equilibrium check")->check(CLI::PositiveNumber);

  ReplayArgs rep;
  auto* replay_cmd = app.add_subcommand("replay", "Replay blocks through the per-order auctions");
  replay_cmd->add_option("--orders", rep.orders, "Orders CSV: block,side,delta_in,delta_out,owner[,ref_price]");
  replay_cmd->add_option("--candles", rep.candles, "Candles CSV: block,low,high");
  replay_cmd->add_option("--pools", rep.pools, "Pool states CSV: block,x,y");
  replay_cmd->add_option("--config", rep.config, "Replay config JSON");
  replay_cmd->add_option("--synthetic", rep.synthetic, "Generate N synthetic blocks instead of reading CSVs")
      ->check(CLI::PositiveNumber);
  replay_cmd->add_option("--n-arbs", rep.n_arbs, "Arbitrageurs per block")->check(CLI::PositiveNumber);
  replay_cmd->add_option("--dist", rep.dist, "Belief distribution")
      ->check(CLI::IsMember({"gaussian", "pareto", "uniform"}));
  replay_cmd->add_option("--sigma", rep.sigma, "Gaussian sd relative to the candle midpoint")
      ->check(CLI::NonNegativeNumber);
  replay_cmd->add_option("--alpha", rep.alpha, "Pareto shape")->check(CLI::Range(1.0, 1e6));
  replay_cmd->add_option("--fee", rep.fees, "Swap fee; repeat to sweep")->check(CLI::Range(0.0, 0.99));
  replay_cmd->add_option("--priority-fee", rep.priority_fee, "Flat numeraire deduction per executed order")
      ->check(CLI::NonNegativeNumber);
  replay_cmd->add_option("--baseline", rep.baseline, "LVR baseline")->check(CLI::IsMember({"midpoint", "winner"}));
  replay_cmd->add_option("--k", rep.k, "Pool invariant override")->check(CLI::PositiveNumber);
  replay_cmd->add_option("--out-dir", rep.out_dir, "Write metrics.csv and summary.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (output == "csv") g.output = OutputFormat::Csv;
  else if (output == "json" || !*demo_cmd) g.output = OutputFormat::Json;

  try {
    if (*demo_cmd) return demo_command(g, demo, out);
    if (*mech_cmd) return mechanism_command(g, mech, out);
    if (*probe_cmd) return probe_command(g, probe, out);
    if (*replay_cmd) return replay_command(g, rep, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::Schema ? kUsage : kDomainFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace mevlab::cli
