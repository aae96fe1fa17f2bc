#include "maxcucl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "maxcucl/error.hpp"

namespace maxcucl {
namespace {

struct CellParams {
  std::size_t diameter;
  double q;
};

struct TrialOutput {
  std::optional<TrialRow> row;
  std::optional<SimResult> result;
  std::optional<std::string> exhausted;
};

bool single_run(ExperimentCase c) {
  return c == ExperimentCase::Example1 || c == ExperimentCase::Case1;
}

DropOracle oracle_for(const Digraph& g, double q) {
  if (q == 0.0) return NoDrops{};
  return BernoulliDrops::uniform(g, q);
}

TrialOutput run_one(const ExperimentSpec& spec, std::size_t cell, const CellParams& params,
                    std::size_t trial) {
  TrialOutput out;
  Rng gen_rng(derive_seed(spec.seed, cell, 2 * trial));
  RandomGraphOptions opts;
  opts.n = spec.n;
  opts.p_edge = spec.p_edge;
  opts.target_diameter = params.diameter;
  opts.max_attempts = spec.max_graph_attempts;
  std::optional<Digraph> graph;
  try {
    graph = random_strongly_connected(opts, gen_rng);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::GenerationBudgetExhausted) throw;
    out.exhausted = e.what();
    return out;
  }
  std::vector<double> states(spec.n);
  for (auto& x : states) x = spec.state_low + (spec.state_high - spec.state_low) * uniform01(gen_rng);

  SimConfig cfg{*graph, std::move(states)};
  cfg.oracle = oracle_for(*graph, params.q);
  cfg.seed = derive_seed(spec.seed, cell, 2 * trial + 1);
  cfg.max_steps = spec.max_steps != 0 ? spec.max_steps
                                      : spec.max_macro_rounds * 2 * cfg.resolved_d_prime();
  cfg.trace_level = single_run(spec.which) ? TraceLevel::Full : TraceLevel::None;
  SimResult result = run(cfg);

  TrialRow row;
  row.cell = cell;
  row.trial = trial;
  row.n = spec.n;
  row.diameter = params.diameter;
  row.q = params.q;
  row.macro_rounds = result.macro_rounds;
  row.terminated_at = result.terminated_at;
  row.converged = result.converged;
  row.q_m = result.q_m;
  out.row = row;
  if (single_run(spec.which)) out.result = std::move(result);
  return out;
}

std::vector<TrialOutput> run_cell(const ExperimentSpec& spec, std::size_t cell,
                                  const CellParams& params) {
  std::vector<TrialOutput> outputs(spec.trials);
  std::vector<std::exception_ptr> errors(spec.trials);
  std::atomic<bool> abort{false};
  std::mutex next_mutex;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t t = 0;
      {
        std::lock_guard lock(next_mutex);
        if (next == spec.trials || abort) return;
        t = next++;
      }
      try {
        outputs[t] = run_one(spec, cell, params, t);
        if (outputs[t].exhausted) abort = true;
      } catch (...) {
        errors[t] = std::current_exception();
        abort = true;
      }
    }
  };
  unsigned threads = spec.threads != 0 ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, spec.trials));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  }
  for (std::size_t t = 0; t < spec.trials; ++t) {
    if (errors[t]) {
      try {
        std::rethrow_exception(errors[t]);
      } catch (const Error& e) {
        throw Error(e.code(), "cell " + std::to_string(cell) + " trial " + std::to_string(t) +
                                  ": " + e.what());
      }
    }
  }
  return outputs;
}

void write_header(std::ostream& out, const ExperimentSpec& spec) {
  out << "# " << describe(spec) << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

}  // namespace

std::string_view to_string(ExperimentCase c) {
  switch (c) {
    case ExperimentCase::Example1: return "example1";
    case ExperimentCase::Case1: return "case1";
    case ExperimentCase::Case2: return "case2";
    case ExperimentCase::Case3: return "case3";
    case ExperimentCase::Custom: return "custom";
  }
  return "custom";
}

std::optional<ExperimentCase> parse_case(std::string_view name) {
  for (auto c : {ExperimentCase::Example1, ExperimentCase::Case1, ExperimentCase::Case2,
                 ExperimentCase::Case3, ExperimentCase::Custom}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

ExperimentSpec ExperimentSpec::preset(ExperimentCase c) {
  ExperimentSpec s;
  s.which = c;
  switch (c) {
    case ExperimentCase::Example1:
      s.n = 3;
      s.diameters = {2};
      s.drop_probs = {0.0};
      s.trials = 1;
      break;
    case ExperimentCase::Case1:
      s.n = 20;
      s.p_edge = 0.2;
      s.diameters = {4};
      s.drop_probs = {0.9};
      s.trials = 1;
      break;
    case ExperimentCase::Case2:
      s.n = 50;
      s.p_edge = 0.2;
      s.diameters = {3, 5, 7};
      s.drop_probs = {0.9};
      s.trials = 20;
      break;
    case ExperimentCase::Case3:
      s.n = 50;
      s.p_edge = 0.2;
      s.diameters = {4};
      s.drop_probs = {0.9, 0.93, 0.96, 0.99};
      s.trials = 100;
      break;
    case ExperimentCase::Custom:
      break;
  }
  return s;
}

SimConfig example1_config() {
  // 0-based: v1 = 0, v2 = 1, v3 = 2. The third link runs v3 -> v1: node 3
  // must hear only node 2 for its state to stay at 3 while (3, 2) drops.
  auto g = Digraph::create(3, {{1, 0}, {0, 1}, {2, 1}, {1, 2}, {0, 2}});
  ScriptedDrops drops;
  drops.drop({2, 1}, 0);
  drops.drop({2, 1}, 1);
  SimConfig cfg{std::move(g), {5.0, 4.0, 3.0}};
  cfg.d_prime = 2;
  cfg.oracle = std::move(drops);
  cfg.trace_level = TraceLevel::Full;
  return cfg;
}

bool ExperimentOutcome::partial() const {
  return std::any_of(cells.begin(), cells.end(), [](const CellSummary& c) { return !c.complete(); });
}

ExperimentOutcome run_experiment(const ExperimentSpec& spec) {
  if (spec.trials == 0) throw Error(ErrorCode::InvalidConfig, "trials must be at least 1");
  if (spec.diameters.empty() || spec.drop_probs.empty()) {
    throw Error(ErrorCode::InvalidConfig, "need at least one diameter and one drop probability");
  }
  for (double q : spec.drop_probs) {
    if (!(q >= 0.0 && q < 1.0)) throw Error(ErrorCode::InvalidConfig, "drop probability outside [0, 1)");
  }
  if (spec.max_steps == 0 && spec.max_macro_rounds < 2) {
    throw Error(ErrorCode::InvalidConfig, "max_macro_rounds must be at least 2");
  }
  if (!(spec.state_low < spec.state_high)) {
    throw Error(ErrorCode::InvalidConfig, "empty initial-state range");
  }

  ExperimentOutcome outcome;
  outcome.spec = spec;

  if (spec.which == ExperimentCase::Example1) {
    SimConfig cfg = example1_config();
    if (spec.max_steps != 0) cfg.max_steps = spec.max_steps;
    SimResult result = run(cfg);
    TrialRow row{0, 0, 3, 2, 0.0, result.macro_rounds, result.terminated_at, result.converged,
                 result.q_m};
    outcome.rows.push_back(row);
    CellSummary cell;
    cell.diameter = 2;
    cell.trials = 1;
    cell.terminated = result.terminated() ? 1 : 0;
    cell.mean_macro_rounds = static_cast<double>(result.macro_rounds);
    cell.min_macro_rounds = cell.max_macro_rounds = result.macro_rounds;
    outcome.cells.push_back(cell);
    outcome.detailed = std::move(result);
    return outcome;
  }

  std::size_t cell = 0;
  for (std::size_t d : spec.diameters) {
    for (double q : spec.drop_probs) {
      const CellParams params{d, q};
      auto outputs = run_cell(spec, cell, params);
      CellSummary summary;
      summary.diameter = d;
      summary.q = q;
      summary.trials = spec.trials;
      for (auto& o : outputs) {
        if (o.exhausted) {
          summary.skipped = *o.exhausted;
          break;
        }
      }
      if (!summary.skipped) {
        double total = 0.0;
        bool first = true;
        for (auto& o : outputs) {
          const TrialRow& row = *o.row;
          outcome.rows.push_back(row);
          if (o.result && !outcome.detailed) outcome.detailed = std::move(o.result);
          if (!row.terminated_at) continue;
          ++summary.terminated;
          total += static_cast<double>(row.macro_rounds);
          summary.min_macro_rounds = first ? row.macro_rounds : std::min(summary.min_macro_rounds, row.macro_rounds);
          summary.max_macro_rounds = first ? row.macro_rounds : std::max(summary.max_macro_rounds, row.macro_rounds);
          first = false;
        }
        if (summary.terminated > 0) summary.mean_macro_rounds = total / static_cast<double>(summary.terminated);
      }
      outcome.cells.push_back(summary);
      ++cell;
    }
  }
  return outcome;
}

std::string describe(const ExperimentSpec& spec) {
  nlohmann::ordered_json j;
  j["case"] = to_string(spec.which);
  j["n"] = spec.n;
  j["p_edge"] = spec.p_edge;
  j["diameters"] = spec.diameters;
  j["drop_probs"] = spec.drop_probs;
  j["trials"] = spec.trials;
  j["seed"] = spec.seed;
  j["rng"] = kRngName;
  j["max_steps"] = spec.max_steps;
  j["max_macro_rounds"] = spec.max_macro_rounds;
  j["max_graph_attempts"] = spec.max_graph_attempts;
  j["initial_states"] = {spec.state_low, spec.state_high};
  return "config " + j.dump();
}

void write_experiment(const ExperimentOutcome& outcome, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto& spec = outcome.spec;
  const auto name = std::string(to_string(spec.which));

  {
    auto out = open_output(dir / "trials.csv");
    write_header(out, spec);
    out << "case,trial,n,D,q,macro_rounds,terminated_at,converged\n";
    for (const auto& r : outcome.rows) {
      out << name << ',' << r.trial << ',' << r.n << ',' << r.diameter << ',' << format_double(r.q)
          << ',' << r.macro_rounds << ','
          << (r.terminated_at ? std::to_string(*r.terminated_at) : std::string("NA")) << ','
          << (r.converged ? 1 : 0) << '\n';
    }
  }
  {
    auto out = open_output(dir / "aggregate.csv");
    write_header(out, spec);
    out << "case,D,q,trials,terminated,mean_macro_rounds,min_macro_rounds,max_macro_rounds,status\n";
    for (const auto& c : outcome.cells) {
      out << name << ',' << c.diameter << ',' << format_double(c.q) << ',' << c.trials << ','
          << c.terminated << ',';
      if (c.skipped || c.terminated == 0) {
        out << "NA,NA,NA,";
      } else {
        out << format_double(c.mean_macro_rounds) << ',' << c.min_macro_rounds << ','
            << c.max_macro_rounds << ',';
      }
      out << (c.skipped ? "skipped" : c.complete() ? "ok" : "partial") << '\n';
    }
  }
  if (outcome.detailed) {
    const SimResult& res = *outcome.detailed;
    {
      auto out = open_output(dir / "summary.csv");
      write_header(out, spec);
      write_summary_csv(out, res);
    }
    {
      auto out = open_output(dir / "states.csv");
      write_header(out, spec);
      out << "macro_round";
      for (std::size_t j = 0; j < res.final_states.size(); ++j) out << ",x" << j + 1;
      out << ",dflag_sum\n";
      for (const auto& row : res.summary) {
        out << row.macro_round;
        for (double x : row.states) out << ',' << format_double(x);
        out << ',' << row.dflag_sum << '\n';
      }
    }
    {
      auto out = open_output(dir / "trace.jsonl");
      nlohmann::ordered_json meta;
      meta["meta"] = describe(spec);
      out << meta.dump() << '\n';
      write_trace_jsonl(out, res);
    }
  }
}

}  // namespace maxcucl
