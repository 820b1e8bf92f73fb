#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace nullguard::rng {

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

/// Mixes a base seed with a stream index (splitmix64 finalizer) so derived
/// streams (per OvR head, per INLP iteration) are decorrelated but fully
/// determined by the base seed.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1]; never returns zero (safe for log()).
inline double uniform01_open(Engine& eng) {
  return static_cast<double>((eng() >> 11) + 1) * 0x1.0p-53;
}

/// Unbiased uniform integer in [0, bound). bound must be positive.
inline std::uint64_t uniform_int(Engine& eng, std::uint64_t bound) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % bound;
  std::uint64_t x = eng();
  while (x >= limit) x = eng();
  return x % bound;
}

/// Standard normal via Box-Muller. The distribution implementation is pinned
/// here (not std::normal_distribution) so identical seeds give identical
/// streams across standard libraries.
inline double normal(Engine& eng) {
  const double u1 = uniform01_open(eng);
  const double u2 = uniform01(eng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

/// Fisher-Yates; same caveat as normal() regarding std::shuffle.
template <typename T>
void shuffle(std::vector<T>& v, Engine& eng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = uniform_int(eng, i);
    std::swap(v[i - 1], v[j]);
  }
}

inline std::vector<std::size_t> permutation(std::size_t n, Engine& eng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  shuffle(idx, eng);
  return idx;
}

}  // namespace nullguard::rng
