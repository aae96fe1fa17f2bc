#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "maxcucl/graph.hpp"

namespace maxcucl {

enum class Phase : std::uint8_t { Phase1, Phase2 };

/// Where global step k falls: Phase1 blocks are the even D'-blocks, Phase2
/// the odd ones; one macro-round is a (Phase1, Phase2) pair.
struct PhasePosition {
  Phase phase;
  std::uint64_t offset;
  std::uint64_t macro_round;
  std::uint64_t d_prime;

  bool block_start() const { return offset == 0; }
  bool block_end() const { return offset + 1 == d_prime; }

  bool operator==(const PhasePosition&) const = default;
};

PhasePosition phase_of(std::uint64_t k, std::uint64_t d_prime);

/// One node's protocol variables. `receipt[t]` is the mark R for
/// `in_neighbors[t]`: 1 until a packet from that neighbour arrives in the
/// current Phase1 block.
struct NodeState {
  NodeId id = 0;
  double x = 0.0;
  double x_old = 0.0;
  std::uint8_t dflag = 1;
  std::vector<NodeId> in_neighbors;
  std::vector<std::uint8_t> receipt;
  bool terminated = false;

  /// Initialisation: x_old = x[0], dflag = 1, every R = 1.
  static NodeState initial(const Digraph& g, NodeId id, double x0);

  bool any_link_silent() const;
};

enum class TerminationDecision { Terminate, Continue };

/// A delivered Phase1 packet.
struct Received {
  NodeId from;
  double value;
};

// Every transition takes the engine's position and throws CalledOffPhase when
// invoked outside its slot or on a terminated node.

/// Phase1, offset 0: stop if dflag is 0, else clear it.
TerminationDecision phase1_begin(NodeState& s, PhasePosition pos);

/// Value broadcast to out-neighbours this step.
double phase1_outgoing(const NodeState& s);

/// Max update over delivered packets only; marks each sender's link as heard.
/// A dropped packet is absent, never a zero. Throws UnknownInNeighbor.
void phase1_apply(NodeState& s, PhasePosition pos, std::span<const Received> received);

/// Phase2, offset 0: raise dflag if some link stayed silent or x grew.
void phase2_begin(NodeState& s, PhasePosition pos);

/// Max of own dflag with those heard from out-neighbours (feedback channels).
void phase2_exchange(NodeState& s, PhasePosition pos,
                     std::span<const std::uint8_t> received_dflags);

/// Phase2, last offset: snapshot x_old and re-arm every receipt mark.
void phase2_end(NodeState& s, PhasePosition pos);

}  // namespace maxcucl
