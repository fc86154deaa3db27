#pragma once

// Platform-independent randomness. Engines are std::mt19937_64 (its output
// sequence is fixed by the standard); seeds for sub-streams are derived with
// the SplitMix64 finalizer. Distributions are implemented here because the
// standard library's are implementation-defined.

#include <algorithm>
#include <cstdint>
#include <random>
#include <unordered_set>
#include <vector>

namespace balext {

using Engine = std::mt19937_64;

/// SplitMix64 output function (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of sub-stream `index` under `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
  return Engine(derive_seed(seed, stream));
}

/// Uniform on [0, bound), bound >= 1, by rejection on the top bits.
inline std::uint64_t uniform_below(Engine& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % bound + 1) % bound;
  for (;;) {
    const std::uint64_t v = rng();
    if (v <= limit) return v % bound;
  }
}

/// The top `bits` bits of one engine output; bits in [1, 64].
inline std::uint64_t uniform_bits(Engine& rng, unsigned bits) {
  return bits >= 64 ? rng() : rng() >> (64 - bits);
}

/// `k` distinct values from [0, n), sorted ascending (Floyd's algorithm).
inline std::vector<std::uint64_t> sample_subset(Engine& rng, std::uint64_t n, std::uint64_t k) {
  std::vector<std::uint64_t> out;
  out.reserve(k);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(k * 2);
  for (std::uint64_t j = n - k; j < n; ++j) {
    const std::uint64_t t = uniform_below(rng, j + 1);
    if (chosen.insert(t).second)
      out.push_back(t);
    else {
      chosen.insert(j);
      out.push_back(j);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace balext
