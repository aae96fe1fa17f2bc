#include "doctest.h"
#include "maxcucl/error.hpp"
#include "maxcucl/protocol.hpp"

using namespace maxcucl;

namespace {

// v1 = 0, v2 = 1, v3 = 2; node 3 hears only node 2.
Digraph example_graph() { return Digraph::create(3, {{1, 0}, {0, 1}, {2, 1}, {1, 2}, {0, 2}}); }

constexpr std::uint64_t kD = 2;

PhasePosition p1(std::uint64_t offset = 0) { return phase_of(offset, kD); }
PhasePosition p2(std::uint64_t offset = 0) { return phase_of(kD + offset, kD); }

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

TEST_CASE("phase_of") {
  CHECK(phase_of(0, 2) == PhasePosition{Phase::Phase1, 0, 0, 2});
  CHECK(phase_of(3, 2) == PhasePosition{Phase::Phase2, 1, 0, 2});
  CHECK(phase_of(10, 2) == PhasePosition{Phase::Phase2, 0, 2, 2});
  CHECK(phase_of(8, 2) == PhasePosition{Phase::Phase1, 0, 2, 2});
  CHECK(phase_of(7, 1) == PhasePosition{Phase::Phase2, 0, 3, 1});
  CHECK(phase_of(5, 3).block_end());
  CHECK_THROWS_AS(phase_of(1, 0), Error);
}

TEST_CASE("initial state") {
  const auto g = example_graph();
  const auto s = NodeState::initial(g, 1, 4.0);
  CHECK(s.x == 4.0);
  CHECK(s.x_old == 4.0);
  CHECK(s.dflag == 1);
  CHECK(s.receipt == std::vector<std::uint8_t>{1, 1});
  CHECK_FALSE(s.terminated);
}

TEST_CASE("phase1_begin") {
  const auto g = example_graph();
  auto s = NodeState::initial(g, 0, 5.0);
  CHECK(phase1_begin(s, p1()) == TerminationDecision::Continue);
  CHECK(s.dflag == 0);
  CHECK(phase1_begin(s, p1()) == TerminationDecision::Terminate);
  CHECK(s.terminated);
  CHECK(code_of([&] { phase1_begin(s, p1()); }) == ErrorCode::CalledOffPhase);

  auto t = NodeState::initial(g, 0, 5.0);
  CHECK(code_of([&] { phase1_begin(t, p1(1)); }) == ErrorCode::CalledOffPhase);
  CHECK(code_of([&] { phase1_begin(t, p2()); }) == ErrorCode::CalledOffPhase);
}

TEST_CASE("phase1_outgoing is the current state") {
  const auto g = example_graph();
  auto s = NodeState::initial(g, 0, 5.0);
  CHECK(phase1_outgoing(s) == 5.0);
  s.x = -3.2;
  CHECK(phase1_outgoing(s) == -3.2);
  auto v2 = NodeState::initial(g, 1, 4.0);
  const Received from_v1[] = {{0, 5.0}};
  phase1_apply(v2, p1(), from_v1);
  CHECK(phase1_outgoing(v2) == 5.0);
}

TEST_CASE("phase1_apply takes the max over delivered packets and clears their marks") {
  const auto g = example_graph();
  auto v2 = NodeState::initial(g, 1, 4.0);
  const Received from_v1[] = {{0, 5.0}};
  phase1_apply(v2, p1(), from_v1);
  CHECK(v2.x == 5.0);
  CHECK(v2.receipt == std::vector<std::uint8_t>{0, 1});  // heard v1, not v3

  auto v3 = NodeState::initial(g, 2, 3.0);
  phase1_apply(v3, p1(1), {});
  CHECK(v3.x == 3.0);
  CHECK(v3.receipt == std::vector<std::uint8_t>{1});

  // Negative states: a delivered smaller value must not turn into zero.
  auto neg = NodeState::initial(g, 2, -1.0);
  const Received low[] = {{1, -5.0}};
  phase1_apply(neg, p1(), low);
  CHECK(neg.x == -1.0);
  CHECK(neg.receipt == std::vector<std::uint8_t>{0});

  const Received stranger[] = {{0, 9.0}};  // node 3 does not hear node 1
  CHECK(code_of([&] { phase1_apply(v3, p1(), stranger); }) == ErrorCode::UnknownInNeighbor);
  CHECK(code_of([&] { phase1_apply(v3, p2(), {}); }) == ErrorCode::CalledOffPhase);
}

TEST_CASE("phase2_begin raises dflag on a silent link or a grown state") {
  const auto g = example_graph();
  auto v3 = NodeState::initial(g, 2, 3.0);
  v3.dflag = 0;
  phase2_begin(v3, p2());
  CHECK(v3.dflag == 1);  // R_32 still 1

  auto v2 = NodeState::initial(g, 1, 4.0);
  v2.dflag = 0;
  v2.receipt = {0, 0};
  v2.x = 5.0;
  phase2_begin(v2, p2());
  CHECK(v2.dflag == 1);

  auto quiet = NodeState::initial(g, 0, 5.0);
  quiet.dflag = 0;
  quiet.receipt = {0, 0};
  phase2_begin(quiet, p2());
  CHECK(quiet.dflag == 0);

  CHECK(code_of([&] { phase2_begin(quiet, p2(1)); }) == ErrorCode::CalledOffPhase);
}

TEST_CASE("phase2_exchange is a max over received flags") {
  const auto g = example_graph();
  auto s = NodeState::initial(g, 0, 5.0);
  s.dflag = 0;
  const std::uint8_t some[] = {1, 0};
  const std::uint8_t none[] = {0, 0};
  phase2_exchange(s, p2(), none);
  CHECK(s.dflag == 0);
  phase2_exchange(s, p2(1), some);
  CHECK(s.dflag == 1);
  phase2_exchange(s, p2(), {});
  CHECK(s.dflag == 1);
  CHECK(code_of([&] { phase2_exchange(s, p1(), none); }) == ErrorCode::CalledOffPhase);
}

TEST_CASE("phase2_end snapshots the state and re-arms receipt marks") {
  const auto g = example_graph();
  auto s = NodeState::initial(g, 1, 4.0);
  s.x = 5.0;
  s.receipt = {0, 1};
  phase2_end(s, p2(kD - 1));
  CHECK(s.x_old == 5.0);
  CHECK(s.receipt == std::vector<std::uint8_t>{1, 1});

  s.receipt = {0, 0};
  phase2_end(s, p2(kD - 1));
  CHECK(s.x_old == 5.0);
  CHECK(s.receipt == std::vector<std::uint8_t>{1, 1});

  CHECK(code_of([&] { phase2_end(s, p2(0)); }) == ErrorCode::CalledOffPhase);
  s.terminated = true;
  CHECK(code_of([&] { phase2_end(s, p2(kD - 1)); }) == ErrorCode::CalledOffPhase);
}
