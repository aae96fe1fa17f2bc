#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "maxcucl/error.hpp"
#include "maxcucl/network.hpp"

using namespace maxcucl;

namespace {

Digraph example_graph() { return Digraph::create(3, {{1, 0}, {0, 1}, {2, 1}, {1, 2}, {2, 0}}); }

}  // namespace

TEST_CASE("no drops delivers everything") {
  const auto g = example_graph();
  Rng rng(1);
  const auto before = rng;
  for (std::uint64_t k : {0u, 5u, 1000u}) {
    const auto d = sample_deliveries(NoDrops{}, g, k, rng);
    CHECK(d.delivered == std::vector<std::uint8_t>(5, 1));
  }
  CHECK(rng == before);
}

TEST_CASE("scripted drops only affect listed (edge, step) pairs") {
  const auto g = example_graph();
  ScriptedDrops s;
  s.drop({2, 1}, 0);
  s.drop({2, 1}, 1);
  const DropOracle oracle = s;
  Rng rng(1);
  const auto idx = *g.edge_index({2, 1});
  for (std::uint64_t k = 0; k < 4; ++k) {
    const auto d = sample_deliveries(oracle, g, k, rng);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      CHECK(d.delivered[e] == ((e == idx && k < 2) ? 0 : 1));
    }
  }
}

TEST_CASE("schedules naming absent edges are rejected") {
  const auto g = example_graph();
  ScriptedDrops s;
  s.drop({0, 2}, 0);  // node 1 does not hear node 3 here
  const DropOracle oracle = s;
  Rng rng(1);
  CHECK_THROWS_AS(validate_oracle(oracle, g), Error);
  try {
    sample_deliveries(oracle, g, 0, rng);
    FAIL("expected UnknownEdgeInSchedule");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownEdgeInSchedule);
  }
}

TEST_CASE("bernoulli parameters are validated") {
  const auto g = example_graph();
  CHECK_NOTHROW(validate_oracle(BernoulliDrops::uniform(g, 0.0), g));
  CHECK_THROWS_AS(validate_oracle(BernoulliDrops::uniform(g, 1.0), g), Error);
  CHECK_THROWS_AS(validate_oracle(BernoulliDrops::uniform(g, -0.1), g), Error);
  CHECK_THROWS_AS(validate_oracle(BernoulliDrops{{0.5}}, g), Error);
  CHECK(max_drop_probability(BernoulliDrops{{0.1, 0.7, 0.3, 0.2, 0.0}}) == 0.7);
  CHECK(max_drop_probability(NoDrops{}) == 0.0);
}

TEST_CASE("bernoulli delivery rate and independence") {
  const auto g = directed_cycle(10);
  const DropOracle oracle = BernoulliDrops::uniform(g, 0.9);
  Rng rng(12345);
  constexpr int rounds = 100'000;
  std::vector<std::vector<double>> series(g.edge_count());
  std::size_t delivered = 0;
  for (int k = 0; k < rounds; ++k) {
    const auto d = sample_deliveries(oracle, g, static_cast<std::uint64_t>(k), rng);
    for (std::size_t e = 0; e < d.delivered.size(); ++e) {
      delivered += d.delivered[e];
      series[e].push_back(d.delivered[e]);
    }
  }
  const double frac = static_cast<double>(delivered) / (10.0 * rounds);
  CHECK(std::abs(frac - 0.1) <= 0.01);

  // Empirical autocorrelation at lags 1..3 per edge.
  for (const auto& s : series) {
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    double var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    for (std::size_t lag = 1; lag <= 3; ++lag) {
      double cov = 0.0;
      for (std::size_t t = lag; t < s.size(); ++t) cov += (s[t] - mean) * (s[t - lag] - mean);
      CHECK(std::abs(cov / var) <= 0.02);
    }
  }
}

TEST_CASE("same seed gives identical delivery sequences") {
  const auto g = complete_digraph(5);
  const DropOracle oracle = BernoulliDrops::uniform(g, 0.5);
  Rng a(99);
  Rng b(99);
  for (std::uint64_t k = 0; k < 200; ++k) {
    CHECK(sample_deliveries(oracle, g, k, a) == sample_deliveries(oracle, g, k, b));
  }
}

TEST_CASE("feedback channel never loses a message") {
  static_assert(feedback_delivery());
  bool all = true;
  for (int i = 0; i < 1'000'000; ++i) all = all && feedback_delivery();
  CHECK(all);
}

TEST_CASE("schedule JSON round trip") {
  std::istringstream in(R"([{"receiver": 3, "sender": 2, "k": 0, "delivered": false},
                            {"receiver": 3, "sender": 2, "k": 1}])");
  const auto s = read_schedule(in);
  REQUIRE(s.schedule.size() == 2);
  CHECK(s.schedule.at({Edge{2, 1}, 1}) == false);
  std::ostringstream out;
  write_schedule(out, s);
  std::istringstream back(out.str());
  CHECK(read_schedule(back).schedule == s.schedule);

  std::istringstream bad(R"({"receiver": 1})");
  CHECK_THROWS_AS(read_schedule(bad), Error);
  std::istringstream missing(R"([{"receiver": 1, "k": 0}])");
  CHECK_THROWS_AS(read_schedule(missing), Error);
}
