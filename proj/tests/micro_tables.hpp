#pragma once

// Seeded micro tables that are (S, M)-balanced by construction.
//
// Uniformly random micro tables are almost never (S, M)-balanced, so tests
// that need balanced inputs start from a row-balanced table (each row holds
// every color N/M times, so no S-subset of a row can hold more than 2S/M of
// one color when S >= N/2) and then take a seeded walk of single-cell
// recolorings, keeping only those the exhaustive verifier accepts.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "balext/rng.hpp"
#include "balext/table.hpp"
#include "balext/verify.hpp"

namespace micro {

inline balext::BalancedTable balanced_walk(const balext::TableParams& p, std::uint64_t seed, int steps = 200) {
  using namespace balext;
  const std::uint64_t n = p.rows(), m = p.colors();
  Engine rng = make_engine(seed, 0);
  std::vector<std::uint64_t> cells(n * n);
  for (std::uint64_t r = 0; r < n; ++r) {
    for (std::uint64_t c = 0; c < n; ++c) cells[r * n + c] = c % m;
    std::shuffle(cells.begin() + static_cast<std::ptrdiff_t>(r * n),
                 cells.begin() + static_cast<std::ptrdiff_t>((r + 1) * n), rng);
  }
  auto table = BalancedTable::from_cells(p, Backend::ExplicitRandom, seed, cells);
  for (int i = 0; i < steps; ++i) {
    const std::uint64_t idx = uniform_below(rng, n * n);
    const std::uint64_t old = cells[idx];
    cells[idx] = uniform_below(rng, m);
    auto next = BalancedTable::from_cells(p, Backend::ExplicitRandom, seed, cells);
    if (verify_exhaustive(next, p.s_exp, p.m_exp).passed)
      table = std::move(next);
    else
      cells[idx] = old;
  }
  return table;
}

}  // namespace micro
