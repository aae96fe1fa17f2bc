#include "maxcucl/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "maxcucl/error.hpp"

namespace maxcucl {
namespace {

class Engine {
 public:
  explicit Engine(const SimConfig& config)
      : cfg_(config), g_(config.graph), d_prime_(config.resolved_d_prime()), rng_(config.seed) {
    const std::size_t n = g_.node_count();
    nodes_.reserve(n);
    for (NodeId j = 0; j < n; ++j) nodes_.push_back(NodeState::initial(g_, j, cfg_.initial_states[j]));
    inbox_.resize(n);
    snapshot_x_.resize(n);
    snapshot_flags_.resize(n);
    out_flags_.resize(n);
    result_.d_prime = d_prime_;
    result_.q_m = *std::max_element(cfg_.initial_states.begin(), cfg_.initial_states.end());
  }

  SimResult run() {
    for (std::uint64_t k = 0;; ++k) {
      const PhasePosition pos = phase_of(k, d_prime_);
      if (pos.phase == Phase::Phase1 && pos.block_start()) {
        if (checkpoint(k, pos)) break;
      }
      if (k == cfg_.max_steps) {
        result_.cap_hit = true;
        result_.macro_rounds = k / (2 * d_prime_);
        break;
      }
      const bool full = cfg_.trace_level == TraceLevel::Full;
      if (full) capture_states(snapshot_x_);
      std::optional<RoundDeliveries> deliveries;
      if (pos.phase == Phase::Phase1) {
        phase1_step(k, pos);
        if (full) deliveries = RoundDeliveries{delivered_};
      } else {
        phase2_step(pos);
      }
      if (full) {
        result_.trace.push_back(TraceEvent{k, pos.phase, snapshot_x_, current_flags(),
                                           std::move(deliveries), false});
      }
    }
    finish();
    return std::move(result_);
  }

 private:
  // Returns true when the run ends here.
  bool checkpoint(std::uint64_t k, PhasePosition pos) {
    const std::size_t raised = static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const NodeState& s) { return s.dflag != 0; }));
    if (k > 0 && raised != 0 && raised != nodes_.size()) {
      throw Error(ErrorCode::DesyncDetected, "dflags disagree at checkpoint k = " + std::to_string(k));
    }
    const bool stop = raised == 0;
    if (stop || cfg_.max_steps != k) {
      std::size_t stopped = 0;
      for (auto& s : nodes_) {
        if (phase1_begin(s, pos) == TerminationDecision::Terminate) ++stopped;
      }
      if (stopped != 0 && stopped != nodes_.size()) {
        throw Error(ErrorCode::DesyncDetected, "one-sided termination at k = " + std::to_string(k));
      }
    }
    if (cfg_.trace_level != TraceLevel::None) {
      SummaryRow row;
      row.macro_round = pos.macro_round;
      capture_states(row.states);
      const auto [lo, hi] = std::minmax_element(row.states.begin(), row.states.end());
      row.min_state = *lo;
      row.max_state = *hi;
      row.dflag_sum = k == 0 ? nodes_.size() : raised_at_phase2_;
      row.terminated = stop;
      result_.summary.push_back(std::move(row));
    }
    if (!stop) return false;
    result_.terminated_at = k;
    result_.macro_rounds = pos.macro_round;
    if (cfg_.trace_level == TraceLevel::Full) {
      TraceEvent ev{k, Phase::Phase1, {}, current_flags(), std::nullopt, true};
      capture_states(ev.states);
      result_.trace.push_back(std::move(ev));
    }
    return true;
  }

  void phase1_step(std::uint64_t k, PhasePosition pos) {
    sample_deliveries_into(cfg_.oracle, g_, k, rng_, delivered_);
    for (std::size_t j = 0; j < nodes_.size(); ++j) snapshot_x_[j] = phase1_outgoing(nodes_[j]);
    const auto edges = g_.edges();
    for (NodeId j = 0; j < nodes_.size(); ++j) {
      auto& inbox = inbox_[j];
      inbox.clear();
      for (std::size_t idx : g_.in_edge_indices(j)) {
        if (delivered_[idx]) inbox.push_back({edges[idx].sender, snapshot_x_[edges[idx].sender]});
      }
    }
    for (NodeId j = 0; j < nodes_.size(); ++j) phase1_apply(nodes_[j], pos, inbox_[j]);
  }

  void phase2_step(PhasePosition pos) {
    if (pos.block_start()) {
      raised_at_phase2_ = 0;
      for (auto& s : nodes_) {
        phase2_begin(s, pos);
        raised_at_phase2_ += s.dflag;
      }
    }
    for (std::size_t j = 0; j < nodes_.size(); ++j) snapshot_flags_[j] = nodes_[j].dflag;
    for (NodeId j = 0; j < nodes_.size(); ++j) {
      out_flags_.clear();
      // dflags travel against edge direction, over the feedback links.
      for (NodeId l : g_.out_neighbors(j)) {
        if (feedback_delivery()) out_flags_.push_back(snapshot_flags_[l]);
      }
      phase2_exchange(nodes_[j], pos, out_flags_);
    }
    if (pos.block_end()) {
      for (auto& s : nodes_) phase2_end(s, pos);
    }
  }

  void finish() {
    result_.final_states.clear();
    capture_states(result_.final_states);
    result_.converged = std::all_of(result_.final_states.begin(), result_.final_states.end(),
                                    [&](double x) { return x == result_.q_m; });
    if (result_.terminated_at && !result_.converged) {
      throw Error(ErrorCode::ValidityViolated,
                  "terminated at k = " + std::to_string(*result_.terminated_at) +
                      " without reaching the maximum");
    }
  }

  void capture_states(std::vector<double>& out) const {
    out.resize(nodes_.size());
    for (std::size_t j = 0; j < nodes_.size(); ++j) out[j] = nodes_[j].x;
  }

  std::vector<std::uint8_t> current_flags() const {
    std::vector<std::uint8_t> flags(nodes_.size());
    for (std::size_t j = 0; j < nodes_.size(); ++j) flags[j] = nodes_[j].dflag;
    return flags;
  }

  const SimConfig& cfg_;
  const Digraph& g_;
  std::uint64_t d_prime_;
  Rng rng_;
  std::vector<NodeState> nodes_;
  std::vector<std::vector<Received>> inbox_;
  std::vector<std::uint8_t> delivered_;
  std::vector<double> snapshot_x_;
  std::vector<std::uint8_t> snapshot_flags_;
  std::vector<std::uint8_t> out_flags_;
  std::size_t raised_at_phase2_ = 0;
  SimResult result_;
};

}  // namespace

void validate_config(const SimConfig& config) {
  const auto& g = config.graph;
  if (config.initial_states.size() != g.node_count()) {
    throw Error(ErrorCode::InvalidConfig, std::to_string(config.initial_states.size()) +
                                              " initial states for " +
                                              std::to_string(g.node_count()) + " nodes");
  }
  for (double x : config.initial_states) {
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidConfig, "initial states must be finite");
  }
  const auto d_prime = config.resolved_d_prime();
  if (d_prime < g.diameter()) {
    throw Error(ErrorCode::InvalidConfig, "D' = " + std::to_string(d_prime) +
                                              " is below the diameter " +
                                              std::to_string(g.diameter()));
  }
  if (config.max_steps < 4 * d_prime) {
    throw Error(ErrorCode::InvalidConfig, "max_steps must be at least 4 * D'");
  }
  validate_oracle(config.oracle, g);
}

SimResult run(const SimConfig& config) {
  validate_config(config);
  return Engine(config).run();
}

std::vector<SimResult> run_trials(const SimConfig& config_template, std::size_t trials,
                                  std::uint64_t seed_base, unsigned threads) {
  if (trials == 0) throw Error(ErrorCode::InvalidArgument, "trials must be at least 1");
  validate_config(config_template);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));

  std::vector<std::optional<SimResult>> slots(trials);
  std::vector<std::exception_ptr> errors(trials);
  std::mutex next_mutex;
  std::size_t next = 0;
  auto worker = [&] {
    SimConfig cfg = config_template;
    for (;;) {
      std::size_t t = 0;
      {
        std::lock_guard lock(next_mutex);
        if (next == trials) return;
        t = next++;
      }
      cfg.seed = seed_base + t;
      try {
        slots[t] = Engine(cfg).run();
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  }

  std::vector<SimResult> results;
  results.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    if (errors[t]) {
      try {
        std::rethrow_exception(errors[t]);
      } catch (const Error& e) {
        throw Error(e.code(), "trial " + std::to_string(t) + ": " + e.what());
      }
    }
    results.push_back(std::move(*slots[t]));
  }
  return results;
}

std::string_view to_string(Phase phase) { return phase == Phase::Phase1 ? "Phase1" : "Phase2"; }

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trace_jsonl(std::ostream& out, const SimResult& result) {
  for (const auto& ev : result.trace) {
    nlohmann::ordered_json line;
    line["k"] = ev.k;
    line["phase"] = to_string(ev.phase);
    line["states"] = ev.states;
    line["dflags"] = ev.dflags;
    if (ev.deliveries) {
      line["deliveries"] = ev.deliveries->delivered;
    } else {
      line["deliveries"] = nullptr;
    }
    line["terminated"] = ev.terminated;
    out << line.dump() << '\n';
  }
}

void write_summary_csv(std::ostream& out, const SimResult& result) {
  out << "macro_round,min_state,max_state,dflag_sum,terminated\n";
  for (const auto& row : result.summary) {
    out << row.macro_round << ',' << format_double(row.min_state) << ','
        << format_double(row.max_state) << ',' << row.dflag_sum << ','
        << (row.terminated ? 1 : 0) << '\n';
  }
}

}  // namespace maxcucl
