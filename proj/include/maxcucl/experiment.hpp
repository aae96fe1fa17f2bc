#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "maxcucl/simulator.hpp"

namespace maxcucl {

enum class ExperimentCase { Example1, Case1, Case2, Case3, Custom };

std::string_view to_string(ExperimentCase c);
std::optional<ExperimentCase> parse_case(std::string_view name);

/// Parameters for a batch of runs. One cell per (diameter, drop probability)
/// pair; each trial draws a fresh graph and fresh initial states.
struct ExperimentSpec {
  ExperimentCase which = ExperimentCase::Custom;
  std::size_t n = 20;
  double p_edge = 0.2;
  std::vector<std::size_t> diameters{4};
  std::vector<double> drop_probs{0.9};
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  /// Per-run step cap; 0 means max_macro_rounds * 2 * D.
  std::uint64_t max_steps = 0;
  std::uint64_t max_macro_rounds = 2000;
  std::size_t max_graph_attempts = 100'000;
  double state_low = 0.0;
  double state_high = 10.0;
  unsigned threads = 0;

  /// Preset parameters for the published scenarios. Custom returns defaults.
  static ExperimentSpec preset(ExperimentCase c);
};

/// Example scenario: 3 nodes, x[0] = (5, 4, 3), D' = 2, and the link into
/// node 3 from node 2 dropping at steps 0 and 1.
SimConfig example1_config();

struct TrialRow {
  std::size_t cell = 0;
  std::size_t trial = 0;
  std::size_t n = 0;
  std::size_t diameter = 0;
  double q = 0.0;
  std::uint64_t macro_rounds = 0;
  std::optional<std::uint64_t> terminated_at;
  bool converged = false;
  double q_m = 0.0;
};

struct CellSummary {
  std::size_t diameter = 0;
  double q = 0.0;
  std::size_t trials = 0;
  std::size_t terminated = 0;
  double mean_macro_rounds = 0.0;
  std::uint64_t min_macro_rounds = 0;
  std::uint64_t max_macro_rounds = 0;
  /// Set when the cell could not run (graph generation exhausted).
  std::optional<std::string> skipped;

  bool complete() const { return !skipped && terminated == trials; }
};

struct ExperimentOutcome {
  ExperimentSpec spec;
  std::vector<TrialRow> rows;
  std::vector<CellSummary> cells;
  /// Full run kept for the single-run scenarios (example1, case1).
  std::optional<SimResult> detailed;

  bool partial() const;
};

/// Deterministic for a given spec regardless of thread count.
ExperimentOutcome run_experiment(const ExperimentSpec& spec);

/// Writes trials.csv, aggregate.csv and, for single-run scenarios, summary.csv,
/// states.csv and trace.jsonl. Every file opens with the resolved config.
void write_experiment(const ExperimentOutcome& outcome, const std::filesystem::path& dir);

/// One-line description of the spec, used as the header comment of outputs.
std::string describe(const ExperimentSpec& spec);

}  // namespace maxcucl
