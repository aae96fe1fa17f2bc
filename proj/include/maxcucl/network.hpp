#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "maxcucl/graph.hpp"
#include "maxcucl/rng.hpp"

namespace maxcucl {

/// Every data packet arrives.
struct NoDrops {};

/// Independent per-edge, per-step drops. drop_prob is indexed like
/// Digraph::edges(); every entry must lie in [0, 1).
struct BernoulliDrops {
  std::vector<double> drop_prob;

  static BernoulliDrops uniform(const Digraph& g, double q);
};

/// Explicit outcomes for listed (edge, step) pairs; everything else is delivered.
struct ScriptedDrops {
  std::map<std::pair<Edge, std::uint64_t>, bool> schedule;

  void drop(Edge e, std::uint64_t k) { schedule[{e, k}] = false; }
};

using DropOracle = std::variant<NoDrops, BernoulliDrops, ScriptedDrops>;

/// w_ji[k] for one step, indexed like Digraph::edges().
struct RoundDeliveries {
  std::vector<std::uint8_t> delivered;

  bool operator==(const RoundDeliveries&) const = default;
};

/// Throws InvalidArgument for bad Bernoulli vectors, UnknownEdgeInSchedule
/// for schedules naming edges the graph lacks.
void validate_oracle(const DropOracle& oracle, const Digraph& g);

/// Delivery outcomes for step k. Bernoulli consumes exactly one draw per edge,
/// in edge-index order; the other variants never touch the generator.
RoundDeliveries sample_deliveries(const DropOracle& oracle, const Digraph& g, std::uint64_t k,
                                  Rng& rng);

/// In-place variant used by the simulator's hot loop.
void sample_deliveries_into(const DropOracle& oracle, const Digraph& g, std::uint64_t k, Rng& rng,
                            std::vector<std::uint8_t>& delivered);

/// Feedback links (acks and dflag traffic) are error-free.
constexpr bool feedback_delivery() noexcept { return true; }

/// Largest q over the edges; 0 for NoDrops. Scripted oracles have no q.
double max_drop_probability(const DropOracle& oracle);

/// Schedule JSON: [{"receiver": j, "sender": i, "k": step, "delivered": false}, ...],
/// node ids 1-based. "delivered" defaults to false when omitted.
ScriptedDrops read_schedule(std::istream& in);
ScriptedDrops read_schedule_file(const std::string& path);
void write_schedule(std::ostream& out, const ScriptedDrops& s);

}  // namespace maxcucl
