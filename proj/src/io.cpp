#include "mevlab/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "mevlab/error.hpp"

namespace mevlab::io {

namespace {

[[noreturn]] void schema(const std::string& msg) { throw Error(ErrorCode::Schema, msg); }

double number(const json& j, const char* key) {
  if (!j.contains(key)) schema(std::string("missing field '") + key + "'");
  if (!j.at(key).is_number()) schema(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

json state_to_json(PoolState s) { return json::array({s.x, s.y}); }

PoolState state_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    schema("reserves must be a two-number array [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

PoolFragment pool_from_json(const json& j) {
  if (!j.is_object()) schema("pool must be an object");
  PoolFragment params;
  if (j.contains("reserves")) params.reserves = state_from_json(j.at("reserves"));
  double fee = j.contains("fee") ? number(j, "fee") : 0.0;
  double k = 0.0;
  if (j.contains("curve")) {
    const json& c = j.at("curve");
    if (!c.is_object() || c.value("type", "") != "constant_product") {
      schema("curve.type must be \"constant_product\"");
    }
    k = number(c, "k");
  } else if (params.reserves) {
    k = params.reserves->x * params.reserves->y;
  } else {
    schema("pool needs a curve or reserves");
  }
  params.config = PoolConfig::constant_product(k, fee);
  if (params.reserves) require_on_curve(params.config.curve_ref(), *params.reserves);
  return params;
}

json pool_to_json(const PoolConfig& config, std::optional<PoolState> reserves) {
  json j;
  if (auto* cp = dynamic_cast<const ConstantProduct*>(config.curve.get())) {
    j["curve"] = {{"type", "constant_product"}, {"k", cp->k()}};
  } else {
    j["curve"] = {{"type", config.curve->name()}};
  }
  if (reserves) j["reserves"] = state_to_json(*reserves);
  j["fee"] = config.fee;
  return j;
}

Direction parse_direction(std::string_view side) {
  if (side == "XY") return Direction::XtoY;
  if (side == "YX") return Direction::YtoX;
  schema("side must be XY or YX, got '" + std::string(side) + "'");
}

json order_to_json(const SwapOrder& o) {
  return {{"side", std::string(to_string(o.direction()))},
          {"delta_in", o.delta_in()},
          {"delta_out", o.delta_out()},
          {"owner", o.owner()}};
}

SwapOrder order_from_json(const json& j) {
  if (!j.is_object() || !j.contains("side") || !j.at("side").is_string()) schema("order needs a string 'side'");
  std::string owner;
  if (j.contains("owner")) {
    if (!j.at("owner").is_string()) schema("order owner must be a string");
    owner = j.at("owner").get<std::string>();
  }
  return SwapOrder(parse_direction(j.at("side").get<std::string>()), number(j, "delta_in"), number(j, "delta_out"),
                   owner);
}

SlotFile slot_from_json(const json& j) {
  if (!j.is_object() || !j.contains("pool")) schema("slot input needs a 'pool' object");
  PoolFragment pool = pool_from_json(j.at("pool"));
  if (!pool.reserves) schema("slot pool needs reserves");
  SlotFile f{pool.config, {}};
  f.input.s0 = *pool.reserves;
  if (j.contains("orders")) {
    if (!j.at("orders").is_array()) schema("'orders' must be an array");
    for (const json& o : j.at("orders")) f.input.orders.push_back(order_from_json(o));
  }
  if (j.contains("reports")) {
    if (!j.at("reports").is_array()) schema("'reports' must be an array");
    for (const json& r : j.at("reports")) {
      if (!r.is_object() || !r.contains("arb") || !r.at("arb").is_number_integer()) {
        schema("report needs an integer 'arb'");
      }
      f.input.reports.push_back({r.at("arb").get<ArbId>(), number(r, "q")});
    }
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) schema("'seed' must be an integer");
    f.input.seed = j.at("seed").get<std::uint64_t>();
  }
  return f;
}

json slot_to_json(const PoolConfig& config, const SlotInput& input) {
  json j;
  j["pool"] = pool_to_json(config, input.s0);
  j["orders"] = json::array();
  for (const SwapOrder& o : input.orders) j["orders"].push_back(order_to_json(o));
  j["reports"] = json::array();
  for (const auto& r : input.reports) j["reports"].push_back({{"arb", r.arb}, {"q", r.q}});
  j["seed"] = input.seed;
  return j;
}

json outcome_to_json(const MechanismOutcome& out) {
  json j;
  j["mechanism"] = std::string(to_string(out.mechanism));
  json steps = json::array();
  for (std::size_t i = 0; i < out.bundle.steps.size(); ++i) {
    const SwapStep& s = out.bundle.steps[i];
    json origin = {{"role", std::string(to_string(s.origin.role))}};
    if (s.origin.is_user()) {
      origin["order"] = *s.origin.order;
    } else {
      origin["arb"] = s.origin.arb;
      if (s.origin.order) origin["order"] = *s.origin.order;
    }
    steps.push_back({{"direction", std::string(to_string(s.direction))},
                     {"amount_in", s.amount_in},
                     {"amount_out", s.amount_out},
                     {"origin", origin},
                     {"pre", state_to_json(out.trace.states[i])},
                     {"post", state_to_json(out.trace.states[i + 1])}});
  }
  j["bundle"] = {{"start", state_to_json(out.bundle.start)},
                 {"steps", steps},
                 {"included_orders", out.bundle.included_orders},
                 {"end", state_to_json(out.final_state())}};
  j["payments"] = json::array();
  for (const Payment& p : out.payments) j["payments"].push_back({{"arb", p.arb}, {"amount", p.amount}});
  j["refunds"] = json::array();
  for (std::size_t k = 0; k < out.orders.size(); ++k) {
    j["refunds"].push_back({{"order", k}, {"owner", out.orders[k].owner()}, {"amount", out.refunds[k]}});
  }
  j["lp_refund"] = out.lp_refund;
  j["audit"] = json::array();
  for (const ItemAudit& a : out.audit) {
    json e;
    switch (a.kind) {
      case ItemKind::Order: e["item"] = a.order; break;
      case ItemKind::InitialState: e["item"] = "initial-state"; break;
      case ItemKind::Everything: e["item"] = "all"; break;
    }
    e["winner"] = a.winner ? json(*a.winner) : json(nullptr);
    e["winning_value"] = a.winning_value;
    e["second_value"] = a.second_value;
    e["tie"] = a.tie;
    e["included"] = a.included;
    if (!a.note.empty()) e["note"] = a.note;
    j["audit"].push_back(e);
  }
  j["fills"] = json::array();
  for (std::size_t k = 0; k < out.fills.size(); ++k) {
    const OrderFill& f = out.fills[k];
    j["fills"].push_back({{"order", k},
                          {"executed", f.executed},
                          {"paid", f.paid},
                          {"received", f.received},
                          {"user_utility", user_utility(out, k)}});
  }
  j["final_state"] = state_to_json(out.final_state());
  j["fees"] = {{"x", out.trace.fees.x}, {"y", out.trace.fees.y}};
  j["checks"] = {{"budget_residual", budget_residual(out)}, {"conservation_residual", conservation_residual(out)}};
  return j;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  schema("missing CSV column '" + std::string(name) + "'");
}

bool CsvTable::has_column(std::string_view name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) schema("unterminated quote in CSV row");
  cells.push_back(cur);
  for (auto& s : cells) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  return cells;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_row(line);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      schema("CSV line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) + " cells, expected " +
             std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) schema("CSV input is empty");
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) schema("cannot open '" + path + "'");
  return read_csv(in);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) schema("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    schema("invalid JSON in '" + path + "': " + e.what());
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_number(const std::string& cell) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    schema("not a number: '" + cell + "'");
  }
  return v;
}

long long parse_integer(const std::string& cell) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    schema("not an integer: '" + cell + "'");
  }
  return v;
}

}  // namespace mevlab::io
