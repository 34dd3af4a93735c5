#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace mevlab::cli {

enum ExitCode : int { kOk = 0, kDomainFailure = 1, kUsage = 2 };

// Text is the demo's default; every other command defaults to JSON.
enum class OutputFormat { Text, Json, Csv };

struct GlobalOptions {
  std::uint64_t seed = 1;
  bool seed_given = false;
  OutputFormat output = OutputFormat::Text;
  bool quiet = false;
};

struct GoldenCheck {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 1e-9;  // relative

  bool ok() const;
};

struct DemoParams {
  double k = 400.0;  // pool invariant; the worked examples use 400
};

struct DemoResult {
  std::vector<GoldenCheck> checks;
  nlohmann::json details;

  bool ok() const;
};

// Runs the three worked examples and compares every golden value.
DemoResult run_demo(const DemoParams& params);

// Parses argv and dispatches; never throws. Returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mevlab::cli
