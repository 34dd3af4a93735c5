#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mevlab/bundle.hpp"
#include "mevlab/orders.hpp"

namespace mevlab {

enum class MechanismKind { Strawman, Rediswap };

std::string_view to_string(MechanismKind k);
MechanismKind parse_mechanism(std::string_view name);

struct ArbitrageurReport {
  ArbId arb = 0;
  double q = 0.0;  // reported external price
};

struct SlotInput {
  PoolState s0;
  std::vector<SwapOrder> orders;
  std::vector<ArbitrageurReport> reports;
  std::uint64_t seed = 0;
};

struct Payment {
  ArbId arb = 0;
  double amount = 0.0;
};

struct OrderFill {
  bool executed = false;
  double paid = 0.0;      // gross input handed over
  double received = 0.0;  // output token obtained
};

enum class ItemKind { Order, InitialState, Everything };

// One auctioned item and how it was settled.
struct ItemAudit {
  ItemKind kind = ItemKind::Order;
  std::size_t order = 0;  // meaningful for ItemKind::Order
  std::optional<ArbId> winner;
  double winning_value = 0.0;
  double second_value = 0.0;
  bool tie = false;
  bool included = false;
  std::string note;
};

struct MechanismOutcome {
  MechanismKind mechanism = MechanismKind::Rediswap;
  std::vector<SwapOrder> orders;
  std::vector<ArbitrageurReport> reports;  // sorted by arbitrageur id
  Bundle bundle;
  ExecutionTrace trace;
  std::vector<Payment> payments;  // one entry per report, same order
  std::vector<double> refunds;    // one entry per order
  double lp_refund = 0.0;
  std::vector<ItemAudit> audit;
  std::vector<OrderFill> fills;

  PoolState final_state() const { return trace.end(); }
  double payment_of(ArbId arb) const;
};

MechanismOutcome strawman_run(const PoolConfig& config, const SlotInput& input);
MechanismOutcome rediswap_run(const PoolConfig& config, const SlotInput& input);
MechanismOutcome run_mechanism(MechanismKind kind, const PoolConfig& config, const SlotInput& input);

// Final holdings of the order's owner valued at the order's own exchange
// rate, counting the numeraire refund.
double user_utility(const MechanismOutcome& outcome, std::size_t order);

// Value to `arb` at its true belief: its own arbitrage steps, plus execution
// value and refunds of its Sybil orders, minus its payment.
double arbitrageur_utility(const MechanismOutcome& outcome, ArbId arb, double true_belief,
                           std::span<const std::size_t> sybil_orders = {});

// |sum(payments) - sum(refunds) - lp_refund| relative to the total paid.
double budget_residual(const MechanismOutcome& outcome);
double conservation_residual(const MechanismOutcome& outcome);

// Timestamped submissions for slot-based execution.
struct TimedOrder {
  std::uint64_t time = 0;
  SwapOrder order;
};

struct TimedReport {
  std::uint64_t time = 0;
  ArbitrageurReport report;
};

struct SlotResult {
  MechanismOutcome outcome;
  PoolState post_state;
  FeeLedger fees;
};

// Runs the redistribution mechanism on everything submitted strictly before
// the cutoff.
SlotResult run_slot(const PoolConfig& config, PoolState s0, std::span<const TimedOrder> order_feed,
                    std::span<const TimedReport> report_feed, std::uint64_t cutoff,
                    std::uint64_t seed = 0);

// Chains slots over one pool. Submissions at or after a slot's cutoff stay
// queued for the next one.
class RoundEngine {
 public:
  RoundEngine(PoolConfig config, PoolState initial);

  void submit(TimedOrder order);
  void submit(TimedReport report);

  SlotResult run_slot(std::uint64_t cutoff, std::uint64_t seed = 0);

  const Pool& pool() const noexcept { return pool_; }
  std::size_t pending_orders() const noexcept { return orders_.size(); }
  std::size_t pending_reports() const noexcept { return reports_.size(); }

 private:
  PoolConfig config_;
  Pool pool_;
  std::vector<TimedOrder> orders_;
  std::vector<TimedReport> reports_;
};

}  // namespace mevlab
