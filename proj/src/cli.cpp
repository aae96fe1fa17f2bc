#include "maxcucl/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "maxcucl/bounds.hpp"
#include "maxcucl/error.hpp"
#include "maxcucl/experiment.hpp"
#include "maxcucl/simulator.hpp"

namespace maxcucl {
namespace {

struct SimulateArgs {
  bool example1 = false;
  std::string graph;
  std::string states;
  bool no_drops = false;
  std::optional<double> drop_prob;
  std::string schedule;
  std::optional<std::uint64_t> d_prime;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> max_steps;
  std::string trace = "summary";
  std::string out_dir;
  bool json = false;
};

struct BoundsArgs {
  std::optional<std::uint64_t> edges;
  std::optional<std::uint64_t> diameter;
  std::string graph;
  double q_max = 0.0;
  double eps1 = 0.01;
  double eps2 = 0.01;
  bool json = false;
};

struct ExperimentArgs {
  std::string which = "custom";
  std::optional<std::size_t> n;
  std::optional<double> p_edge;
  std::vector<std::size_t> diameters;
  std::vector<double> drop_probs;
  std::optional<std::size_t> trials;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> max_steps;
  std::optional<std::uint64_t> max_macro_rounds;
  std::optional<std::size_t> max_graph_attempts;
  unsigned threads = 0;
  std::string out_dir;
  bool json = false;
};

std::vector<double> parse_states(const std::string& text) {
  std::istringstream in(text);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw Error(ErrorCode::ParseError, "bad state value '" + token + "'");
    values.push_back(v);
  }
  return values;
}

std::string join_states(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    if (j) s += ' ';
    s += format_double(xs[j]);
  }
  return s;
}

TraceLevel parse_trace(const std::string& s) {
  if (s == "none") return TraceLevel::None;
  if (s == "summary") return TraceLevel::Summary;
  if (s == "full") return TraceLevel::Full;
  throw Error(ErrorCode::InvalidConfig, "trace level must be none, summary or full");
}

std::string sim_meta(const SimConfig& cfg, const SimulateArgs& a) {
  nlohmann::ordered_json j;
  j["command"] = "simulate";
  j["example1"] = a.example1;
  j["graph"] = a.graph;
  j["n"] = cfg.graph.node_count();
  j["edges"] = cfg.graph.edge_count();
  j["diameter"] = cfg.graph.diameter();
  j["d_prime"] = cfg.resolved_d_prime();
  j["initial_states"] = cfg.initial_states;
  if (std::holds_alternative<NoDrops>(cfg.oracle)) {
    j["oracle"] = "none";
  } else if (std::holds_alternative<BernoulliDrops>(cfg.oracle)) {
    j["oracle"] = "bernoulli";
    j["drop_prob"] = max_drop_probability(cfg.oracle);
  } else {
    j["oracle"] = "scripted";
    j["schedule"] = a.schedule;
  }
  j["seed"] = cfg.seed;
  j["rng"] = kRngName;
  j["max_steps"] = cfg.max_steps;
  return "config " + j.dump();
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<SimConfig> cfg;
  if (a.example1) {
    if (!a.graph.empty() || !a.states.empty()) {
      throw Error(ErrorCode::InvalidConfig, "--example1 cannot be combined with --graph/--states");
    }
    cfg = example1_config();
  } else {
    if (a.graph.empty()) throw Error(ErrorCode::InvalidConfig, "--graph or --example1 is required");
    if (a.states.empty()) throw Error(ErrorCode::InvalidConfig, "--states is required");
    const int oracles = (a.no_drops ? 1 : 0) + (a.drop_prob ? 1 : 0) + (a.schedule.empty() ? 0 : 1);
    if (oracles > 1) {
      throw Error(ErrorCode::InvalidConfig, "choose one of --no-drops, --drop-prob, --schedule");
    }
    Digraph g = read_graph_file(a.graph);
    auto states = parse_states(a.states);
    cfg.emplace(SimConfig{std::move(g), std::move(states)});
    if (a.drop_prob) {
      if (!(*a.drop_prob >= 0.0 && *a.drop_prob < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "--drop-prob must lie in [0, 1)");
      }
      cfg->oracle = BernoulliDrops::uniform(cfg->graph, *a.drop_prob);
    } else if (!a.schedule.empty()) {
      cfg->oracle = read_schedule_file(a.schedule);
    }
  }
  if (a.d_prime) cfg->d_prime = *a.d_prime;
  cfg->seed = a.seed;
  if (a.max_steps) cfg->max_steps = *a.max_steps;
  cfg->trace_level = parse_trace(a.trace);

  const SimResult res = run(*cfg);

  if (!a.out_dir.empty()) {
    std::filesystem::create_directories(a.out_dir);
    const auto meta = sim_meta(*cfg, a);
    if (cfg->trace_level != TraceLevel::None) {
      std::ofstream f(std::filesystem::path(a.out_dir) / "summary.csv", std::ios::binary);
      if (!f) throw Error(ErrorCode::IoError, "cannot write summary.csv");
      f << "# " << meta << '\n';
      write_summary_csv(f, res);
    }
    if (cfg->trace_level == TraceLevel::Full) {
      std::ofstream f(std::filesystem::path(a.out_dir) / "trace.jsonl", std::ios::binary);
      if (!f) throw Error(ErrorCode::IoError, "cannot write trace.jsonl");
      nlohmann::ordered_json m;
      m["meta"] = meta;
      f << m.dump() << '\n';
      write_trace_jsonl(f, res);
    }
  }

  if (a.json) {
    nlohmann::ordered_json j;
    j["terminated_at"] = res.terminated_at ? nlohmann::ordered_json(*res.terminated_at)
                                           : nlohmann::ordered_json(nullptr);
    j["macro_rounds"] = res.macro_rounds;
    j["d_prime"] = res.d_prime;
    j["q_m"] = res.q_m;
    j["converged"] = res.converged;
    j["final_states"] = res.final_states;
    j["cap_hit"] = res.cap_hit;
    out << j.dump(2) << '\n';
  } else {
    out << "terminated_at=" << (res.terminated_at ? std::to_string(*res.terminated_at) : "none") << '\n'
        << "macro_rounds=" << res.macro_rounds << '\n'
        << "q_m=" << format_double(res.q_m) << '\n'
        << "converged=" << (res.converged ? "true" : "false") << '\n'
        << "final_states=" << join_states(res.final_states) << '\n';
  }
  if (res.cap_hit) {
    err << "MaxStepsExceeded: no termination within " << cfg->max_steps << " steps\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_bounds(const BoundsArgs& a, std::ostream& out) {
  BoundsReport r;
  if (!a.graph.empty()) {
    if (a.edges || a.diameter) {
      throw Error(ErrorCode::InvalidConfig, "--graph excludes --edges/--diameter");
    }
    r = compute_report(read_graph_file(a.graph), a.q_max, a.eps1, a.eps2);
  } else {
    if (!a.edges || !a.diameter) {
      throw Error(ErrorCode::InvalidConfig, "need --edges and --diameter, or --graph");
    }
    r = compute_report(*a.edges, *a.diameter, a.q_max, a.eps1, a.eps2);
  }
  if (a.json) {
    write_report_json(out, r);
  } else {
    write_report_text(out, r);
  }
  return kExitOk;
}

int cmd_experiment(const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
  const auto which = parse_case(a.which);
  if (!which) throw Error(ErrorCode::InvalidConfig, "unknown case '" + a.which + "'");
  if (a.out_dir.empty()) throw Error(ErrorCode::InvalidConfig, "--out is required");
  ExperimentSpec spec = ExperimentSpec::preset(*which);
  const bool preset = *which != ExperimentCase::Custom;
  if (preset && (a.n || a.p_edge || !a.diameters.empty() || !a.drop_probs.empty() || a.trials)) {
    throw Error(ErrorCode::InvalidConfig, "presets pin n, p_edge, diameters, drop probs and trials");
  }
  if (a.n) spec.n = *a.n;
  if (a.p_edge) spec.p_edge = *a.p_edge;
  if (!a.diameters.empty()) spec.diameters = a.diameters;
  if (!a.drop_probs.empty()) spec.drop_probs = a.drop_probs;
  if (a.trials) spec.trials = *a.trials;
  spec.seed = a.seed;
  if (a.max_steps) spec.max_steps = *a.max_steps;
  if (a.max_macro_rounds) spec.max_macro_rounds = *a.max_macro_rounds;
  if (a.max_graph_attempts) spec.max_graph_attempts = *a.max_graph_attempts;
  spec.threads = a.threads;

  const auto outcome = run_experiment(spec);
  write_experiment(outcome, a.out_dir);

  if (a.json) {
    auto cells = nlohmann::ordered_json::array();
    for (const auto& c : outcome.cells) {
      nlohmann::ordered_json j;
      j["D"] = c.diameter;
      j["q"] = c.q;
      j["trials"] = c.trials;
      j["terminated"] = c.terminated;
      j["mean_macro_rounds"] = c.mean_macro_rounds;
      j["min_macro_rounds"] = c.min_macro_rounds;
      j["max_macro_rounds"] = c.max_macro_rounds;
      j["skipped"] = c.skipped ? nlohmann::ordered_json(*c.skipped) : nlohmann::ordered_json(nullptr);
      cells.push_back(j);
    }
    out << cells.dump(2) << '\n';
  } else {
    for (const auto& c : outcome.cells) {
      out << "D=" << c.diameter << " q=" << format_double(c.q);
      if (c.skipped) {
        out << " skipped: " << *c.skipped << '\n';
        continue;
      }
      out << " terminated=" << c.terminated << '/' << c.trials
          << " mean_macro_rounds=" << format_double(c.mean_macro_rounds)
          << " min=" << c.min_macro_rounds << " max=" << c.max_macro_rounds << '\n';
    }
  }
  if (outcome.partial()) {
    err << "experiment incomplete: some cells were skipped or hit the step cap\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::GenerationBudgetExhausted:
    case ErrorCode::DesyncDetected:
    case ErrorCode::ValidityViolated:
    case ErrorCode::IoError:
      return kExitRuntime;
    default:
      return kExitConfig;
  }
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Max-consensus over lossy links: simulator, bounds and experiments", "maxcucl"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run one simulation");
  s->add_flag("--example1", sim.example1, "Use the built-in 3-node example scenario");
  s->add_option("--graph", sim.graph, "Graph file ('n m' then 'j i' per edge, 1-based)");
  s->add_option("--states", sim.states, "Initial states, whitespace separated");
  s->add_flag("--no-drops", sim.no_drops, "Every packet is delivered");
  s->add_option("--drop-prob", sim.drop_prob, "Uniform Bernoulli drop probability");
  s->add_option("--schedule", sim.schedule, "Scripted drop schedule (JSON)");
  s->add_option("--dprime", sim.d_prime, "Phase length D' (defaults to the diameter)");
  s->add_option("--seed", sim.seed, "RNG seed");
  s->add_option("--max-steps", sim.max_steps, "Step cap");
  s->add_option("--trace", sim.trace, "none | summary | full");
  s->add_option("--out", sim.out_dir, "Output directory for summary.csv / trace.jsonl");
  s->add_flag("--json", sim.json, "Print the result as JSON");

  BoundsArgs bnd;
  auto* b = app.add_subcommand("bounds", "Probabilistic bound on the termination step");
  b->add_option("--edges", bnd.edges, "Edge count |E|");
  b->add_option("--diameter", bnd.diameter, "Diameter D");
  b->add_option("--graph", bnd.graph, "Read |E| and D from a graph file");
  b->add_option("--qmax", bnd.q_max, "Largest drop probability");
  b->add_option("--eps1", bnd.eps1, "Slack for one delivery per link");
  b->add_option("--eps2", bnd.eps2, "Slack for no D-long silence");
  b->add_flag("--json", bnd.json, "Print JSON");

  ExperimentArgs exp;
  auto* e = app.add_subcommand("experiment", "Batch runs over random digraphs");
  e->add_option("--case", exp.which, "example1 | case1 | case2 | case3 | custom");
  e->add_option("--n", exp.n, "Node count (custom)");
  e->add_option("--p-edge", exp.p_edge, "Edge probability (custom)");
  e->add_option("--diameters", exp.diameters, "Target diameters (custom)")->delimiter(',');
  e->add_option("--drop-probs", exp.drop_probs, "Drop probabilities (custom)")->delimiter(',');
  e->add_option("--trials", exp.trials, "Trials per cell (custom)");
  e->add_option("--seed", exp.seed, "Base seed");
  e->add_option("--max-steps", exp.max_steps, "Per-run step cap (overrides --max-macro-rounds)");
  e->add_option("--max-macro-rounds", exp.max_macro_rounds, "Per-run cap in macro-rounds (default 2000)");
  e->add_option("--max-graph-attempts", exp.max_graph_attempts, "Rejection-sampling budget");
  e->add_option("--threads", exp.threads, "Worker threads (0 = all cores)");
  e->add_option("--out", exp.out_dir, "Output directory");
  e->add_flag("--json", exp.json, "Print the aggregate as JSON");

  std::vector<std::string> argv(args.begin(), args.end());
  std::reverse(argv.begin(), argv.end());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (s->parsed()) return cmd_simulate(sim, out, err);
    if (b->parsed()) return cmd_bounds(bnd, out);
    return cmd_experiment(exp, out, err);
  } catch (const Error& ex) {
    err << ex.what() << '\n';
    return exit_code_for(ex);
  } catch (const std::exception& ex) {
    err << ex.what() << '\n';
    return kExitRuntime;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace maxcucl
