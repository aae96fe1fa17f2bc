#include "maxcucl/protocol.hpp"

#include <algorithm>

#include "maxcucl/error.hpp"

namespace maxcucl {
namespace {

void require_slot(const NodeState& s, const char* op, bool in_slot) {
  if (s.terminated) {
    throw Error(ErrorCode::CalledOffPhase,
                std::string(op) + " on terminated node " + std::to_string(s.id + 1));
  }
  if (!in_slot) {
    throw Error(ErrorCode::CalledOffPhase,
                std::string(op) + " outside its slot on node " + std::to_string(s.id + 1));
  }
}

}  // namespace

PhasePosition phase_of(std::uint64_t k, std::uint64_t d_prime) {
  if (d_prime == 0) throw Error(ErrorCode::InvalidArgument, "D' must be positive");
  const std::uint64_t block = k / d_prime;
  return PhasePosition{block % 2 == 0 ? Phase::Phase1 : Phase::Phase2, k % d_prime,
                       k / (2 * d_prime), d_prime};
}

NodeState NodeState::initial(const Digraph& g, NodeId id, double x0) {
  NodeState s;
  s.id = id;
  s.x = x0;
  s.x_old = x0;
  s.dflag = 1;
  const auto in = g.in_neighbors(id);
  s.in_neighbors.assign(in.begin(), in.end());
  s.receipt.assign(in.size(), 1);
  return s;
}

bool NodeState::any_link_silent() const {
  return std::any_of(receipt.begin(), receipt.end(), [](std::uint8_t r) { return r == 1; });
}

TerminationDecision phase1_begin(NodeState& s, PhasePosition pos) {
  require_slot(s, "phase1_begin", pos.phase == Phase::Phase1 && pos.block_start());
  if (s.dflag == 0) {
    s.terminated = true;
    return TerminationDecision::Terminate;
  }
  s.dflag = 0;
  return TerminationDecision::Continue;
}

double phase1_outgoing(const NodeState& s) { return s.x; }

void phase1_apply(NodeState& s, PhasePosition pos, std::span<const Received> received) {
  require_slot(s, "phase1_apply", pos.phase == Phase::Phase1);
  double next = s.x;
  for (const auto& msg : received) {
    const auto it = std::lower_bound(s.in_neighbors.begin(), s.in_neighbors.end(), msg.from);
    if (it == s.in_neighbors.end() || *it != msg.from) {
      throw Error(ErrorCode::UnknownInNeighbor, std::to_string(msg.from + 1) + " -> " +
                                                    std::to_string(s.id + 1));
    }
    s.receipt[static_cast<std::size_t>(it - s.in_neighbors.begin())] = 0;
    next = std::max(next, msg.value);
  }
  s.x = next;
}

void phase2_begin(NodeState& s, PhasePosition pos) {
  require_slot(s, "phase2_begin", pos.phase == Phase::Phase2 && pos.block_start());
  if (s.any_link_silent() || s.x > s.x_old) s.dflag = 1;
}

void phase2_exchange(NodeState& s, PhasePosition pos,
                     std::span<const std::uint8_t> received_dflags) {
  require_slot(s, "phase2_exchange", pos.phase == Phase::Phase2);
  for (std::uint8_t f : received_dflags) s.dflag = std::max(s.dflag, f);
}

void phase2_end(NodeState& s, PhasePosition pos) {
  require_slot(s, "phase2_end", pos.phase == Phase::Phase2 && pos.block_end());
  s.x_old = s.x;
  std::fill(s.receipt.begin(), s.receipt.end(), std::uint8_t{1});
}

}  // namespace maxcucl
