#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "maxcucl/graph.hpp"

namespace maxcucl {

/// Probabilistic termination bound: with probability at least 1 - eps_combined
/// the protocol stops by step k_terminal = 2 D (k0 + k1).
struct BoundsReport {
  double q_max = 0.0;
  std::uint64_t diameter = 0;
  std::uint64_t edges = 0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double p1 = 0.0;
  std::uint64_t k0 = 0;
  /// Unset when p1 reaches 1: no number of epochs makes a D-long silence unlikely.
  std::optional<std::uint64_t> k1;
  std::optional<std::uint64_t> k_terminal;
  double eps_combined = 0.0;
  /// The p1 expression collapses to 0 for a single edge; flagged, not corrected.
  bool p1_degenerate = false;

  bool vacuous() const { return !k_terminal.has_value(); }
};

/// ceil(log(1/eps1) / log(1/q_max)), at least 1; 1 when q_max == 0.
/// Throws DomainError unless 0 < eps1 < 1 and 0 <= q_max < 1.
std::uint64_t compute_k0(double eps1, double q_max);

/// sum_{l=1..m} C(m,l) q^(l D) (1 - q^((m-l) D)), clamped to [0, 1].
/// Binomials are exact big integers; the sum is accumulated at 50 digits.
double compute_p1(std::uint64_t m, std::uint64_t diameter, double q_max);

/// ceil(log(1/eps2) / log(1/p1)), at least 0; 0 when p1 == 0.
/// Throws DomainError unless 0 < eps2 < 1 and 0 <= p1 < 1.
std::uint64_t compute_k1(double eps2, double p1);

/// Assembles all quantities. A p1 of 1 yields a vacuous report instead of an error.
BoundsReport compute_report(std::uint64_t m, std::uint64_t diameter, double q_max, double eps1,
                            double eps2);
BoundsReport compute_report(const Digraph& g, double q_max, double eps1, double eps2);

void write_report_text(std::ostream& out, const BoundsReport& r);
void write_report_json(std::ostream& out, const BoundsReport& r);

}  // namespace maxcucl
