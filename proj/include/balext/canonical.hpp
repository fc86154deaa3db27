#pragma once

// The lexicographically first (S, D)-balanced table, comparing tables by
// their row-major color sequence.
//
// Depth-first search assigns cells in row-major order, trying colors in
// ascending order. Every S x S rectangle keeps a histogram of its assigned
// cells; top-(M/D) mass never decreases as cells are filled, so a partial
// assignment that already violates some rectangle is abandoned. The first
// complete assignment reached is therefore the lexicographic minimum.

#include <cstdint>
#include <string>
#include <vector>

#include "balext/combinations.hpp"
#include "balext/error.hpp"
#include "balext/table.hpp"
#include "balext/verify.hpp"

namespace balext {

namespace detail {

class CanonicalSearch {
 public:
  explicit CanonicalSearch(const TableParams& p) : params_(p), check_(p.m_exp, p.d_exp) {
    n_ = static_cast<unsigned>(p.rows());
    colors_ = static_cast<unsigned>(p.colors());
    const unsigned side = 1U << p.s_exp;
    area_ = std::uint64_t{side} * side;
    const auto subsets = revolving_door_subsets(n_, side);
    const std::size_t rect_count = subsets.size() * subsets.size();
    hist_.assign(rect_count * colors_, 0);
    containing_.resize(std::size_t{n_} * n_);
    for (std::size_t ri = 0; ri < subsets.size(); ++ri)
      for (std::size_t ci = 0; ci < subsets.size(); ++ci)
        for (std::uint64_t r : mask_elements(subsets[ri]))
          for (std::uint64_t c : mask_elements(subsets[ci]))
            containing_[r * n_ + c].push_back(static_cast<std::uint32_t>(ri * subsets.size() + ci));
    cells_.assign(std::size_t{n_} * n_, 0);
  }

  bool run() { return place(0); }
  const std::vector<std::uint64_t>& cells() const { return cells_; }

 private:
  bool place(std::size_t idx) {
    if (idx == cells_.size()) return true;
    for (unsigned color = 0; color < colors_; ++color) {
      cells_[idx] = color;
      bool ok = true;
      for (std::uint32_t rect : containing_[idx]) {
        std::uint32_t* h = &hist_[std::size_t{rect} * colors_];
        ++h[color];
        if (ok && check_.score(std::span<const std::uint32_t>(h, colors_), scratch_) > 2 * area_) ok = false;
      }
      if (ok && place(idx + 1)) return true;
      for (std::uint32_t rect : containing_[idx]) --hist_[std::size_t{rect} * colors_ + color];
    }
    return false;
  }

  TableParams params_;
  BalanceCheck check_;
  unsigned n_ = 0;
  unsigned colors_ = 0;
  std::uint64_t area_ = 0;
  std::vector<std::uint32_t> hist_;
  std::vector<std::vector<std::uint32_t>> containing_;
  std::vector<std::uint64_t> cells_;
  std::vector<std::uint32_t> scratch_;
};

}  // namespace detail

inline BalancedTable canonical_table(const TableParams& p, const TableLimits& limits = {}) {
  p.validate();
  require(p.n_exp <= 6 && p.m_exp <= 16, ErrorKind::TooLarge, "canonical search is for micro tables only");
  const std::uint64_t bits = p.rows() * p.rows() * p.m_exp;
  require(bits <= limits.max_canonical_bits, ErrorKind::TooLarge,
          "N^2 * m_exp = " + std::to_string(bits) + " exceeds canonical cap " + std::to_string(limits.max_canonical_bits));
  detail::CanonicalSearch search(p);
  require(search.run(), ErrorKind::NotFound, "no (S,D)-balanced table exists at " + p.str());
  auto table = BalancedTable::from_cells(p, Backend::ExplicitCanonical, 0, search.cells());
  // The search's pruning is the same predicate; confirm with the verifier.
  require(verify_exhaustive(table, p.s_exp, p.d_exp).passed, ErrorKind::NotFound,
          "canonical search produced an unbalanced table");
  return table;
}

}  // namespace balext
