#include "maxcucl/graph.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "maxcucl/error.hpp"

namespace maxcucl {
namespace {

// Adjacency as bit rows: row[u] has bit v set when u -> v is a hop.
class BitAdjacency {
 public:
  BitAdjacency(std::size_t n, std::span<const Edge> edges, bool forward)
      : n_(n), words_((n + 63) / 64), rows_(n * words_, 0) {
    for (const auto& e : edges) {
      const NodeId from = forward ? e.sender : e.receiver;
      const NodeId to = forward ? e.receiver : e.sender;
      rows_[from * words_ + to / 64] |= std::uint64_t{1} << (to % 64);
    }
  }

  // Frontier-at-a-time BFS. Returns the eccentricity of `source`, or nullopt
  // if some node is unreachable.
  std::optional<std::size_t> eccentricity(NodeId source) const {
    std::vector<std::uint64_t> reached(words_, 0);
    std::vector<std::uint64_t> frontier(words_, 0);
    std::vector<std::uint64_t> next(words_, 0);
    set(reached, source);
    set(frontier, source);
    std::size_t count = 1;
    std::size_t depth = 0;
    while (count < n_) {
      std::fill(next.begin(), next.end(), 0);
      for (std::size_t w = 0; w < words_; ++w) {
        for (std::uint64_t bits = frontier[w]; bits != 0; bits &= bits - 1) {
          const NodeId u = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
          const std::uint64_t* row = &rows_[u * words_];
          for (std::size_t x = 0; x < words_; ++x) next[x] |= row[x];
        }
      }
      std::size_t added = 0;
      for (std::size_t w = 0; w < words_; ++w) {
        next[w] &= ~reached[w];
        reached[w] |= next[w];
        added += static_cast<std::size_t>(std::popcount(next[w]));
      }
      if (added == 0) return std::nullopt;
      count += added;
      ++depth;
      frontier.swap(next);
    }
    return depth;
  }

 private:
  static void set(std::vector<std::uint64_t>& bits, NodeId v) {
    bits[v / 64] |= std::uint64_t{1} << (v % 64);
  }

  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> rows_;
};

void validate(std::size_t n, std::vector<Edge>& edges) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "digraph needs at least 2 nodes");
  for (const auto& e : edges) {
    if (e.receiver >= n || e.sender >= n) {
      throw Error(ErrorCode::NodeIndexOutOfRange,
                  "edge (" + std::to_string(e.receiver + 1) + ", " + std::to_string(e.sender + 1) +
                      ") with n = " + std::to_string(n));
    }
    if (e.receiver == e.sender) {
      throw Error(ErrorCode::SelfLoop, "node " + std::to_string(e.receiver + 1));
    }
  }
  std::sort(edges.begin(), edges.end());
  const auto dup = std::adjacent_find(edges.begin(), edges.end());
  if (dup != edges.end()) {
    throw Error(ErrorCode::DuplicateEdge, "edge (" + std::to_string(dup->receiver + 1) + ", " +
                                              std::to_string(dup->sender + 1) + ")");
  }
}

}  // namespace

Digraph Digraph::create(std::size_t n, std::vector<Edge> edges) {
  validate(n, edges);
  if (!is_strongly_connected(n, edges)) {
    throw Error(ErrorCode::NotStronglyConnected, "digraph with n = " + std::to_string(n));
  }
  Digraph g;
  g.n_ = n;
  g.edges_ = std::move(edges);
  g.in_.resize(n);
  g.out_.resize(n);
  g.in_edge_idx_.resize(n);
  for (std::size_t idx = 0; idx < g.edges_.size(); ++idx) {
    const auto& e = g.edges_[idx];
    g.in_[e.receiver].push_back(e.sender);
    g.in_edge_idx_[e.receiver].push_back(idx);
    g.out_[e.sender].push_back(e.receiver);
  }
  // Edges are sorted receiver-major, so in-lists are already ascending.
  for (auto& outs : g.out_) std::sort(outs.begin(), outs.end());
  g.diameter_ = maxcucl::diameter(n, g.edges_);
  return g;
}

std::optional<std::size_t> Digraph::edge_index(Edge e) const {
  const auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || *it != e) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

Digraph Digraph::reversed() const {
  std::vector<Edge> flipped;
  flipped.reserve(edges_.size());
  for (const auto& e : edges_) flipped.push_back({e.sender, e.receiver});
  return create(n_, std::move(flipped));
}

bool is_strongly_connected(std::size_t n, std::span<const Edge> edges) {
  if (n == 0) return false;
  return BitAdjacency(n, edges, true).eccentricity(0).has_value() &&
         BitAdjacency(n, edges, false).eccentricity(0).has_value();
}

namespace {

// Stops early once the running maximum exceeds `limit`; the returned value is
// then only known to be > limit.
std::size_t diameter_up_to(std::size_t n, std::span<const Edge> edges, std::size_t limit) {
  const BitAdjacency adj(n, edges, true);
  std::size_t longest = 0;
  for (NodeId s = 0; s < n && longest <= limit; ++s) {
    const auto ecc = adj.eccentricity(s);
    if (!ecc) throw Error(ErrorCode::NotStronglyConnected, "diameter undefined");
    longest = std::max(longest, *ecc);
  }
  return longest;
}

}  // namespace

std::size_t diameter(std::size_t n, std::span<const Edge> edges) {
  return diameter_up_to(n, edges, n);
}

Digraph random_strongly_connected(const RandomGraphOptions& opts, Rng& rng) {
  if (opts.n < 2) throw Error(ErrorCode::InvalidArgument, "n must be at least 2");
  if (!(opts.p_edge > 0.0 && opts.p_edge <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "p_edge must lie in (0, 1]");
  }
  std::vector<Edge> edges;
  for (std::size_t attempt = 0; attempt < opts.max_attempts; ++attempt) {
    edges.clear();
    for (NodeId j = 0; j < opts.n; ++j) {
      for (NodeId i = 0; i < opts.n; ++i) {
        if (i == j) continue;
        if (bernoulli(rng, opts.p_edge)) edges.push_back({j, i});
      }
    }
    if (!is_strongly_connected(opts.n, edges)) continue;
    if (opts.target_diameter &&
        diameter_up_to(opts.n, edges, *opts.target_diameter) != *opts.target_diameter) {
      continue;
    }
    return Digraph::create(opts.n, edges);
  }
  std::ostringstream msg;
  msg << "no strongly connected digraph with n = " << opts.n << ", p_edge = " << opts.p_edge;
  if (opts.target_diameter) msg << ", diameter = " << *opts.target_diameter;
  msg << " after " << opts.max_attempts << " attempts";
  throw Error(ErrorCode::GenerationBudgetExhausted, msg.str());
}

Digraph read_graph(std::istream& in) {
  std::size_t n = 0;
  std::size_t m = 0;
  if (!(in >> n >> m)) throw Error(ErrorCode::ParseError, "expected header 'n m'");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t line = 0; line < m; ++line) {
    long long j = 0;
    long long i = 0;
    if (!(in >> j >> i)) {
      throw Error(ErrorCode::ParseError, "expected " + std::to_string(m) + " edge lines, got " +
                                             std::to_string(line));
    }
    if (j < 1 || i < 1) {
      throw Error(ErrorCode::NodeIndexOutOfRange, "node ids are 1-based");
    }
    edges.push_back({static_cast<NodeId>(j - 1), static_cast<NodeId>(i - 1)});
  }
  std::string rest;
  if (in >> rest) throw Error(ErrorCode::ParseError, "trailing content after edge list");
  return Digraph::create(n, std::move(edges));
}

Digraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_graph(in);
}

void write_graph(std::ostream& out, const Digraph& g) {
  out << g.node_count() << ' ' << g.edge_count() << '\n';
  for (const auto& e : g.edges()) out << e.receiver + 1 << ' ' << e.sender + 1 << '\n';
}

Digraph directed_cycle(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId j = 0; j < n; ++j) edges.push_back({(j + 1) % n, j});
  return Digraph::create(n, std::move(edges));
}

Digraph complete_digraph(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId j = 0; j < n; ++j) {
    for (NodeId i = 0; i < n; ++i) {
      if (i != j) edges.push_back({j, i});
    }
  }
  return Digraph::create(n, std::move(edges));
}

}  // namespace maxcucl
