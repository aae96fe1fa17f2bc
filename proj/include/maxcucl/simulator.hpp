#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "maxcucl/graph.hpp"
#include "maxcucl/network.hpp"
#include "maxcucl/protocol.hpp"

namespace maxcucl {

enum class TraceLevel { None, Summary, Full };

struct SimConfig {
  SimConfig(Digraph g, std::vector<double> x0)
      : graph(std::move(g)), initial_states(std::move(x0)) {}

  Digraph graph;
  std::vector<double> initial_states;
  /// Phase length D'; the graph diameter when unset.
  std::optional<std::uint64_t> d_prime;
  DropOracle oracle = NoDrops{};
  std::uint64_t seed = 0;
  /// Steps 0..max_steps-1 execute; a termination check may still fire at k = max_steps.
  std::uint64_t max_steps = 1'000'000;
  TraceLevel trace_level = TraceLevel::None;

  std::uint64_t resolved_d_prime() const { return d_prime.value_or(graph.diameter()); }
};

/// Throws InvalidConfig (or the oracle's validation error).
void validate_config(const SimConfig& config);

/// One executed step. `states` is x[k] (entering the step); `dflags` are the
/// values after the step ran. A termination event carries the final dflags.
struct TraceEvent {
  std::uint64_t k = 0;
  Phase phase = Phase::Phase1;
  std::vector<double> states;
  std::vector<std::uint8_t> dflags;
  std::optional<RoundDeliveries> deliveries;
  bool terminated = false;
};

/// Snapshot at checkpoint k = 2 * macro_round * D'. dflag_sum counts the flags
/// raised at the start of the preceding Phase2, before dissemination (n for
/// row 0, where every flag starts raised).
struct SummaryRow {
  std::uint64_t macro_round = 0;
  std::vector<double> states;
  double min_state = 0.0;
  double max_state = 0.0;
  std::size_t dflag_sum = 0;
  bool terminated = false;
};

struct SimResult {
  std::optional<std::uint64_t> terminated_at;
  /// Completed (Phase1, Phase2) pairs.
  std::uint64_t macro_rounds = 0;
  std::uint64_t d_prime = 0;
  std::vector<double> final_states;
  double q_m = 0.0;
  bool converged = false;
  bool cap_hit = false;
  std::vector<TraceEvent> trace;
  std::vector<SummaryRow> summary;

  bool terminated() const { return terminated_at.has_value(); }
};

/// Runs the protocol in lockstep until every node stops or the step cap hits.
/// Throws DesyncDetected / ValidityViolated if a safety property breaks; both
/// indicate a bug, not bad luck.
SimResult run(const SimConfig& config);

/// Trial t uses seed seed_base + t. Results are in trial order whatever the
/// thread count; errors are rethrown tagged with their trial index.
std::vector<SimResult> run_trials(const SimConfig& config_template, std::size_t trials,
                                  std::uint64_t seed_base, unsigned threads = 0);

std::string_view to_string(Phase phase);

/// JSON-lines trace, one TraceEvent per line. No meta line is written here.
void write_trace_jsonl(std::ostream& out, const SimResult& result);

/// CSV: macro_round,min_state,max_state,dflag_sum,terminated (header row included).
void write_summary_csv(std::ostream& out, const SimResult& result);

/// Shortest round-trip decimal form, stable across runs.
std::string format_double(double v);

}  // namespace maxcucl
