#include <sstream>

#include "doctest.h"
#include "maxcucl/error.hpp"
#include "maxcucl/graph.hpp"
#include "oracles.hpp"

using namespace maxcucl;

namespace {

// 1-based (receiver, sender) pairs, as written in the literature.
std::vector<Edge> one_based(std::initializer_list<std::pair<int, int>> pairs) {
  std::vector<Edge> out;
  for (auto [j, i] : pairs) out.push_back({static_cast<NodeId>(j - 1), static_cast<NodeId>(i - 1)});
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("three-node example digraph has diameter 2") {
  const auto g = Digraph::create(3, one_based({{2, 1}, {1, 2}, {3, 2}, {2, 3}, {3, 1}}));
  CHECK(g.diameter() == 2);
  CHECK(g.edge_count() == 5);
  CHECK(is_strongly_connected(g));
  // v2 hears v1 and v3; v1 is heard by v2 and v3.
  CHECK(std::vector<NodeId>(g.in_neighbors(1).begin(), g.in_neighbors(1).end()) ==
        std::vector<NodeId>{0, 2});
  CHECK(std::vector<NodeId>(g.out_neighbors(0).begin(), g.out_neighbors(0).end()) ==
        std::vector<NodeId>{1, 2});
  CHECK(g.in_degree(2) == 2);
  CHECK(g.out_degree(2) == 1);
}

TEST_CASE("two-node complete digraph") {
  const auto g = Digraph::create(2, one_based({{1, 2}, {2, 1}}));
  CHECK(g.diameter() == 1);
}

TEST_CASE("construction errors") {
  CHECK(code_of([] { Digraph::create(3, one_based({{2, 1}, {3, 2}})); }) ==
        ErrorCode::NotStronglyConnected);
  CHECK(code_of([] { Digraph::create(2, one_based({{1, 1}, {1, 2}, {2, 1}})); }) ==
        ErrorCode::SelfLoop);
  CHECK(code_of([] { Digraph::create(2, one_based({{1, 3}, {2, 1}})); }) ==
        ErrorCode::NodeIndexOutOfRange);
  CHECK(code_of([] { Digraph::create(2, one_based({{1, 2}, {2, 1}, {1, 2}})); }) ==
        ErrorCode::DuplicateEdge);
  CHECK(code_of([] { Digraph::create(1, {}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("strong connectivity on named shapes") {
  CHECK(is_strongly_connected(5, directed_cycle(5).edges()));
  const auto path = one_based({{2, 1}, {3, 2}});
  CHECK_FALSE(is_strongly_connected(3, path));
  CHECK(code_of([&] { diameter(3, path); }) == ErrorCode::NotStronglyConnected);
}

TEST_CASE("diameter of named shapes") {
  CHECK(complete_digraph(4).diameter() == 1);
  for (std::size_t n = 2; n <= 9; ++n) CHECK(directed_cycle(n).diameter() == n - 1);
}

TEST_CASE("random digraphs: diameter matches Floyd-Warshall and survives reversal") {
  Rng rng(2024);
  for (int t = 0; t < 60; ++t) {
    RandomGraphOptions opts;
    opts.n = 3 + static_cast<std::size_t>(t % 20);
    opts.p_edge = 0.15 + 0.01 * (t % 30);
    const auto g = random_strongly_connected(opts, rng);
    const std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    REQUIRE(oracle::diameter(g.node_count(), edges).has_value());
    CHECK(g.diameter() == *oracle::diameter(g.node_count(), edges));
    CHECK(g.diameter() == diameter(g));
    CHECK(g.reversed().diameter() == g.diameter());
    CHECK(g.diameter() >= 1);
    CHECK(g.diameter() <= g.node_count() - 1);
    for (NodeId j = 0; j < g.node_count(); ++j) {
      for (NodeId i : g.in_neighbors(j)) CHECK(g.has_edge({j, i}));
      for (NodeId l : g.out_neighbors(j)) CHECK(g.has_edge({l, j}));
    }
  }
}

TEST_CASE("random generation is seed-determined and honours the target diameter") {
  RandomGraphOptions opts;
  opts.n = 20;
  opts.p_edge = 0.2;
  opts.target_diameter = 4;
  Rng a(77);
  Rng b(77);
  const auto ga = random_strongly_connected(opts, a);
  const auto gb = random_strongly_connected(opts, b);
  CHECK(ga.node_count() == 20);
  CHECK(ga.diameter() == 4);
  CHECK(std::equal(ga.edges().begin(), ga.edges().end(), gb.edges().begin(), gb.edges().end()));
}

TEST_CASE("p_edge = 1 yields the complete digraph") {
  Rng rng(1);
  RandomGraphOptions opts;
  opts.n = 2;
  opts.p_edge = 1.0;
  const auto g = random_strongly_connected(opts, rng);
  CHECK(g.edge_count() == 2);
  CHECK(g.diameter() == 1);
}

TEST_CASE("generation budget is enforced") {
  Rng rng(5);
  RandomGraphOptions opts;
  opts.n = 6;
  opts.p_edge = 1.0;
  opts.target_diameter = 3;  // a complete digraph always has diameter 1
  opts.max_attempts = 50;
  CHECK(code_of([&] { random_strongly_connected(opts, rng); }) ==
        ErrorCode::GenerationBudgetExhausted);
  opts.p_edge = 0.0;
  CHECK(code_of([&] { random_strongly_connected(opts, rng); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("graph file round trip and sorted writer") {
  std::istringstream in("3 5\n3 1\n2 1\n1 2\n3 2\n2 3\n");
  const auto g = read_graph(in);
  std::ostringstream out;
  write_graph(out, g);
  CHECK(out.str() == "3 5\n1 2\n2 1\n2 3\n3 1\n3 2\n");
  std::istringstream again(out.str());
  CHECK(read_graph(again).diameter() == g.diameter());
}

TEST_CASE("graph file errors") {
  std::istringstream short_list("3 2\n2 1\n");
  CHECK(code_of([&] { read_graph(short_list); }) == ErrorCode::ParseError);
  std::istringstream zero_based("2 2\n0 1\n1 0\n");
  CHECK(code_of([&] { read_graph(zero_based); }) == ErrorCode::NodeIndexOutOfRange);
  std::istringstream garbage("hello");
  CHECK(code_of([&] { read_graph(garbage); }) == ErrorCode::ParseError);
}
