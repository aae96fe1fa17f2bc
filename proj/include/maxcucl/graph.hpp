#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maxcucl/rng.hpp"

namespace maxcucl {

using NodeId = std::size_t;

/// Directed link (receiver, sender): the receiver hears the sender.
/// Node ids are 0-based in code and 1-based in files.
struct Edge {
  NodeId receiver;
  NodeId sender;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable, validated, strongly connected digraph without self-loops.
///
/// Edges are stored sorted by (receiver, sender); an edge's position in
/// edges() is its stable index, used by delivery vectors and drop schedules.
class Digraph {
 public:
  /// Validates and builds. Throws Error with SelfLoop, NodeIndexOutOfRange,
  /// DuplicateEdge, InvalidArgument (n < 2) or NotStronglyConnected.
  static Digraph create(std::size_t n, std::vector<Edge> edges);

  std::size_t node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  /// N_j^-: nodes j receives from, ascending.
  std::span<const NodeId> in_neighbors(NodeId j) const { return in_.at(j); }
  /// N_j^+: nodes that receive from j, ascending.
  std::span<const NodeId> out_neighbors(NodeId j) const { return out_.at(j); }
  std::size_t in_degree(NodeId j) const { return in_.at(j).size(); }
  std::size_t out_degree(NodeId j) const { return out_.at(j).size(); }

  /// Indices into edges() of the links arriving at j, aligned with in_neighbors(j).
  std::span<const std::size_t> in_edge_indices(NodeId j) const { return in_edge_idx_.at(j); }

  std::optional<std::size_t> edge_index(Edge e) const;
  bool has_edge(Edge e) const { return edge_index(e).has_value(); }

  /// Longest shortest directed path; cached at construction.
  std::size_t diameter() const noexcept { return diameter_; }

  /// Same nodes, every edge flipped. The result is strongly connected too.
  Digraph reversed() const;

 private:
  Digraph() = default;

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> in_;
  std::vector<std::vector<NodeId>> out_;
  std::vector<std::vector<std::size_t>> in_edge_idx_;
  std::size_t diameter_ = 0;
};

/// Adjacency helpers that work on unvalidated input, so they can judge
/// candidates before a Digraph exists. `edges` must be in range.
bool is_strongly_connected(std::size_t n, std::span<const Edge> edges);
inline bool is_strongly_connected(const Digraph& g) {
  return is_strongly_connected(g.node_count(), g.edges());
}

/// Max over ordered pairs of BFS distance. Throws NotStronglyConnected.
std::size_t diameter(std::size_t n, std::span<const Edge> edges);
inline std::size_t diameter(const Digraph& g) { return diameter(g.node_count(), g.edges()); }

struct RandomGraphOptions {
  std::size_t n = 20;
  double p_edge = 0.2;
  std::optional<std::size_t> target_diameter;
  std::size_t max_attempts = 100'000;
};

/// Rejection-samples G(n, p) digraphs until one is strongly connected (and has
/// the target diameter, if set). Ordered pairs are visited receiver-major, one
/// uniform draw each. Throws GenerationBudgetExhausted.
Digraph random_strongly_connected(const RandomGraphOptions& opts, Rng& rng);

/// Text format: "n m" then m lines "j i" (1-based), each meaning j receives from i.
Digraph read_graph(std::istream& in);
Digraph read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const Digraph& g);

// Named shapes used by tests and the CLI.
Digraph directed_cycle(std::size_t n);
Digraph complete_digraph(std::size_t n);

}  // namespace maxcucl
