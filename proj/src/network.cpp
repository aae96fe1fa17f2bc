#include "maxcucl/network.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "maxcucl/error.hpp"

namespace maxcucl {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

BernoulliDrops BernoulliDrops::uniform(const Digraph& g, double q) {
  return BernoulliDrops{std::vector<double>(g.edge_count(), q)};
}

void validate_oracle(const DropOracle& oracle, const Digraph& g) {
  std::visit(overloaded{
                 [](const NoDrops&) {},
                 [&](const BernoulliDrops& b) {
                   if (b.drop_prob.size() != g.edge_count()) {
                     throw Error(ErrorCode::InvalidArgument,
                                 "drop probability vector has " +
                                     std::to_string(b.drop_prob.size()) + " entries for " +
                                     std::to_string(g.edge_count()) + " edges");
                   }
                   for (double q : b.drop_prob) {
                     if (!(q >= 0.0 && q < 1.0)) {
                       throw Error(ErrorCode::InvalidArgument,
                                   "drop probability must lie in [0, 1), got " + std::to_string(q));
                     }
                   }
                 },
                 [&](const ScriptedDrops& s) {
                   for (const auto& [key, delivered] : s.schedule) {
                     const Edge& e = key.first;
                     if (!g.has_edge(e)) {
                       throw Error(ErrorCode::UnknownEdgeInSchedule,
                                   "(" + std::to_string(e.receiver + 1) + ", " +
                                       std::to_string(e.sender + 1) + ")");
                     }
                   }
                 },
             },
             oracle);
}

void sample_deliveries_into(const DropOracle& oracle, const Digraph& g, std::uint64_t k, Rng& rng,
                            std::vector<std::uint8_t>& delivered) {
  delivered.assign(g.edge_count(), 1);
  std::visit(overloaded{
                 [](const NoDrops&) {},
                 [&](const BernoulliDrops& b) {
                   for (std::size_t idx = 0; idx < delivered.size(); ++idx) {
                     delivered[idx] = bernoulli(rng, b.drop_prob[idx]) ? 0 : 1;
                   }
                 },
                 [&](const ScriptedDrops& s) {
                   for (const auto& [key, ok] : s.schedule) {
                     if (key.second != k) continue;
                     const auto idx = g.edge_index(key.first);
                     if (!idx) {
                       throw Error(ErrorCode::UnknownEdgeInSchedule,
                                   "(" + std::to_string(key.first.receiver + 1) + ", " +
                                       std::to_string(key.first.sender + 1) + ")");
                     }
                     delivered[*idx] = ok ? 1 : 0;
                   }
                 },
             },
             oracle);
}

RoundDeliveries sample_deliveries(const DropOracle& oracle, const Digraph& g, std::uint64_t k,
                                  Rng& rng) {
  RoundDeliveries out;
  sample_deliveries_into(oracle, g, k, rng, out.delivered);
  return out;
}

double max_drop_probability(const DropOracle& oracle) {
  if (const auto* b = std::get_if<BernoulliDrops>(&oracle)) {
    return b->drop_prob.empty() ? 0.0 : *std::max_element(b->drop_prob.begin(), b->drop_prob.end());
  }
  if (std::holds_alternative<NoDrops>(oracle)) return 0.0;
  throw Error(ErrorCode::InvalidArgument, "scripted schedules have no drop probability");
}

ScriptedDrops read_schedule(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::ParseError, "schedule must be a JSON array");
  ScriptedDrops out;
  for (const auto& rec : doc) {
    try {
      const auto j = rec.at("receiver").get<long long>();
      const auto i = rec.at("sender").get<long long>();
      const auto k = rec.at("k").get<long long>();
      const bool delivered = rec.value("delivered", false);
      if (j < 1 || i < 1) throw Error(ErrorCode::NodeIndexOutOfRange, "node ids are 1-based");
      if (k < 0) throw Error(ErrorCode::ParseError, "negative step in schedule");
      out.schedule[{Edge{static_cast<NodeId>(j - 1), static_cast<NodeId>(i - 1)},
                    static_cast<std::uint64_t>(k)}] = delivered;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, e.what());
    }
  }
  return out;
}

ScriptedDrops read_schedule_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_schedule(in);
}

void write_schedule(std::ostream& out, const ScriptedDrops& s) {
  auto doc = nlohmann::json::array();
  for (const auto& [key, delivered] : s.schedule) {
    doc.push_back({{"receiver", key.first.receiver + 1},
                   {"sender", key.first.sender + 1},
                   {"k", key.second},
                   {"delivered", delivered}});
  }
  out << doc.dump() << '\n';
}

}  // namespace maxcucl
