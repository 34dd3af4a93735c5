#pragma once

#include <cstddef>
#include <vector>

#include "mevlab/pool.hpp"

namespace mevlab {

// Ordered steps starting from a given pool state, plus which user orders
// made it in.
struct Bundle {
  PoolState start;
  std::vector<SwapStep> steps;
  std::vector<std::size_t> included_orders;
};

struct ExecutionTrace {
  std::vector<PoolState> states;  // states[0] == start, states[i+1] after step i
  std::vector<StepResult> results;
  FeeLedger fees;

  PoolState end() const { return states.back(); }
};

// Replays every step through apply_swap. Throws on the first invalid step.
ExecutionTrace execute(const PoolConfig& config, const Bundle& bundle);

// Value to whoever executed the step, at price v, when the step is fee-free:
// what the pool lost in x times v plus what it lost in y.
double step_value(PoolState pre, PoolState post, double v);

// Largest relative imbalance, over both tokens, between trader flows, the
// reserve change and fee credits. Zero up to rounding for a valid trace.
double conservation_residual(const Bundle& bundle, const ExecutionTrace& trace);

}  // namespace mevlab
