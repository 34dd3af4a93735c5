#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mevlab/mechanisms.hpp"

namespace mevlab::io {

using nlohmann::json;

// Pool fragment: {"curve":{"type":"constant_product","k":K}, "reserves":[x,y], "fee":f}.
// Either curve or reserves may be omitted, not both; k defaults to x*y.
struct PoolFragment {
  PoolConfig config;
  std::optional<PoolState> reserves;
};

PoolFragment pool_from_json(const json& j);
json pool_to_json(const PoolConfig& config, std::optional<PoolState> reserves);

json state_to_json(PoolState s);
PoolState state_from_json(const json& j);

json order_to_json(const SwapOrder& o);
SwapOrder order_from_json(const json& j);
Direction parse_direction(std::string_view side);

// {"pool":{...}, "orders":[...], "reports":[{"arb","q"}], "seed":u64}
struct SlotFile {
  PoolConfig config;
  SlotInput input;
};

SlotFile slot_from_json(const json& j);
json slot_to_json(const PoolConfig& config, const SlotInput& input);

json outcome_to_json(const MechanismOutcome& out);

// Minimal RFC-4180-ish reader: comma separated, optional double quotes, first
// row is the header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a column; throws Schema when missing.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);
json read_json_file(const std::string& path);

// Shortest text that reads back to the same double.
std::string format_number(double v);

// Strict number parsing for CSV cells; throws Schema.
double parse_number(const std::string& cell);
long long parse_integer(const std::string& cell);

}  // namespace mevlab::io
