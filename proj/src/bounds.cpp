#include "maxcucl/bounds.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "maxcucl/error.hpp"
#include "maxcucl/simulator.hpp"

namespace maxcucl {
namespace {

namespace mp = boost::multiprecision;
using Wide = mp::cpp_bin_float_50;

void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw Error(ErrorCode::DomainError, std::string(name) + " must lie in (0, 1), got " +
                                            format_double(v));
  }
}

void require_half_open_unit(double v, const char* name) {
  if (!(v >= 0.0 && v < 1.0)) {
    throw Error(ErrorCode::DomainError, std::string(name) + " must lie in [0, 1), got " +
                                            format_double(v));
  }
}

// Ceiling of a log ratio. Ratios that are integers up to rounding (ln 100 / ln 10)
// snap to that integer instead of bumping to the next one.
std::uint64_t ceil_ratio(double num, double den) {
  const double r = num / den;
  const double nearest = std::round(r);
  if (std::abs(r - nearest) <= 1e-9 * std::max(1.0, std::abs(r))) {
    return static_cast<std::uint64_t>(std::max(0.0, nearest));
  }
  return static_cast<std::uint64_t>(std::max(0.0, std::ceil(r)));
}

}  // namespace

std::uint64_t compute_k0(double eps1, double q_max) {
  require_open_unit(eps1, "eps1");
  require_half_open_unit(q_max, "q_max");
  if (q_max == 0.0) return 1;
  return std::max<std::uint64_t>(1, ceil_ratio(std::log(1.0 / eps1), std::log(1.0 / q_max)));
}

double compute_p1(std::uint64_t m, std::uint64_t diameter, double q_max) {
  if (m < 1) throw Error(ErrorCode::DomainError, "edge count must be at least 1");
  if (diameter < 1) throw Error(ErrorCode::DomainError, "diameter must be at least 1");
  require_half_open_unit(q_max, "q_max");
  if (q_max == 0.0) return 0.0;

  // a = q^D is the chance a given link stays silent for D straight steps.
  const Wide a = mp::pow(Wide(q_max), static_cast<long long>(diameter));
  mp::cpp_int binom = 1;
  Wide a_pow = 1;
  Wide sum = 0;
  for (std::uint64_t lambda = 1; lambda <= m; ++lambda) {
    binom = binom * (m - lambda + 1) / lambda;
    a_pow *= a;
    const Wide rest = 1 - mp::pow(a, static_cast<long long>(m - lambda));
    sum += Wide(binom) * a_pow * rest;
    if (sum >= 1) return 1.0;
  }
  return std::clamp(sum.convert_to<double>(), 0.0, 1.0);
}

std::uint64_t compute_k1(double eps2, double p1) {
  require_open_unit(eps2, "eps2");
  if (p1 == 1.0) {
    throw Error(ErrorCode::DomainError, "p1 = 1 makes the bound vacuous");
  }
  require_half_open_unit(p1, "p1");
  if (p1 == 0.0) return 0;
  return ceil_ratio(std::log(1.0 / eps2), std::log(1.0 / p1));
}

BoundsReport compute_report(std::uint64_t m, std::uint64_t diameter, double q_max, double eps1,
                            double eps2) {
  require_open_unit(eps2, "eps2");
  BoundsReport r;
  r.q_max = q_max;
  r.diameter = diameter;
  r.edges = m;
  r.eps1 = eps1;
  r.eps2 = eps2;
  r.k0 = compute_k0(eps1, q_max);
  r.p1 = compute_p1(m, diameter, q_max);
  r.p1_degenerate = m == 1;
  if (r.p1 < 1.0) {
    r.k1 = compute_k1(eps2, r.p1);
    r.k_terminal = 2 * diameter * (r.k0 + *r.k1);
  }
  r.eps_combined = 1.0 - std::pow(1.0 - eps1, static_cast<double>(diameter)) * (1.0 - eps2);
  return r;
}

BoundsReport compute_report(const Digraph& g, double q_max, double eps1, double eps2) {
  return compute_report(g.edge_count(), g.diameter(), q_max, eps1, eps2);
}

void write_report_text(std::ostream& out, const BoundsReport& r) {
  auto row = [&](const char* name, const std::string& value) {
    out << std::left << std::setw(14) << name << value << '\n';
  };
  row("edges", std::to_string(r.edges));
  row("diameter", std::to_string(r.diameter));
  row("q_max", format_double(r.q_max));
  row("eps1", format_double(r.eps1));
  row("eps2", format_double(r.eps2));
  row("p1", format_double(r.p1) + (r.p1_degenerate ? "  (degenerate: single edge)" : ""));
  row("k0", std::to_string(r.k0));
  row("k1", r.k1 ? std::to_string(*r.k1) : "unbounded (p1 = 1)");
  row("k_terminal", r.k_terminal ? std::to_string(*r.k_terminal) : "unbounded (p1 = 1)");
  row("eps", format_double(r.eps_combined));
}

void write_report_json(std::ostream& out, const BoundsReport& r) {
  nlohmann::ordered_json j;
  j["edges"] = r.edges;
  j["diameter"] = r.diameter;
  j["q_max"] = r.q_max;
  j["eps1"] = r.eps1;
  j["eps2"] = r.eps2;
  j["p1"] = r.p1;
  j["p1_degenerate"] = r.p1_degenerate;
  j["k0"] = r.k0;
  j["k1"] = r.k1 ? nlohmann::ordered_json(*r.k1) : nlohmann::ordered_json(nullptr);
  j["k_terminal"] = r.k_terminal ? nlohmann::ordered_json(*r.k_terminal) : nlohmann::ordered_json(nullptr);
  j["eps_combined"] = r.eps_combined;
  out << j.dump(2) << '\n';
}

}  // namespace maxcucl
