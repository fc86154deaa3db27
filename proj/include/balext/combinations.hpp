#pragma once

// k-subsets of {0, ..., n-1} (n <= 64) as bitmasks, in revolving-door order:
// consecutive subsets differ by removing one element and adding another.

#include <bit>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "balext/error.hpp"

namespace balext {

/// C(n, k), saturating at UINT64_MAX.
constexpr std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

namespace detail {

inline void revolving_door(unsigned n, unsigned k, std::uint64_t prefix, bool reversed, std::vector<std::uint64_t>& out) {
  if (k == 0) {
    out.push_back(prefix);
    return;
  }
  if (k == n) {
    out.push_back(prefix | ((n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1)));
    return;
  }
  const std::uint64_t top = std::uint64_t{1} << (n - 1);
  // R(n, k) = R(n-1, k), then reverse(R(n-1, k-1)) + {n-1}.
  if (!reversed) {
    revolving_door(n - 1, k, prefix, false, out);
    revolving_door(n - 1, k - 1, prefix | top, true, out);
  } else {
    revolving_door(n - 1, k - 1, prefix | top, false, out);
    revolving_door(n - 1, k, prefix, true, out);
  }
}

}  // namespace detail

inline std::vector<std::uint64_t> revolving_door_subsets(unsigned n, unsigned k) {
  require(n <= 64 && k <= n, ErrorKind::InvalidParams, "subset enumeration needs k <= n <= 64");
  const std::uint64_t count = binomial(n, k);
  require(count <= (std::uint64_t{1} << 28), ErrorKind::TooLarge, "too many subsets to enumerate");
  std::vector<std::uint64_t> out;
  out.reserve(count);
  detail::revolving_door(n, k, 0, false, out);
  return out;
}

/// Elements of a bitmask in ascending order.
inline std::vector<std::uint64_t> mask_elements(std::uint64_t mask) {
  std::vector<std::uint64_t> out;
  while (mask != 0) {
    out.push_back(static_cast<std::uint64_t>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return out;
}

/// (removed, added) between two subsets that differ by one swap.
inline std::pair<unsigned, unsigned> swap_of(std::uint64_t from, std::uint64_t to) {
  return {static_cast<unsigned>(std::countr_zero(from & ~to)), static_cast<unsigned>(std::countr_zero(to & ~from))};
}

}  // namespace balext
