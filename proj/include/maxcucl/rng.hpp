#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace maxcucl {

/// The one generator used everywhere. std::mt19937_64 is fully specified by
/// the standard, so seeded sequences match across platforms. Distributions are
/// hand-rolled below because the std:: ones are implementation-defined.
using Rng = std::mt19937_64;

inline constexpr std::string_view kRngName = "mt19937_64";

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// True with probability p (one draw consumed regardless of p).
inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// splitmix64 finalizer; used to derive independent child seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return mix_seed(mix_seed(mix_seed(base) ^ a) ^ b);
}

}  // namespace maxcucl
