#pragma once

// (S, D)-balance checking.
//
// A table is (S, D)-balanced when every rectangle with at least S rows and S
// columns gives every color set A of size M/D at most 2 |A|/M of its cells.
// For a fixed rectangle the worst A is the M/D most frequent colors, so each
// rectangle is checked through its histogram: the top-(M/D) mass must not
// exceed 2 (M/D)/M * area. Checking rectangles of exactly S x S suffices:
// a larger rectangle's A-mass is the average of its S x S sub-rectangles'.
//
// Each rectangle gets an integer score with score / (2 * area) the ratio of
// observed mass to allowed mass; the rectangle violates iff score > 2 * area.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "balext/combinations.hpp"
#include "balext/error.hpp"
#include "balext/parallel.hpp"
#include "balext/rational.hpp"
#include "balext/rng.hpp"
#include "balext/table.hpp"

namespace balext {

struct Rectangle {
  std::vector<std::uint64_t> rows;
  std::vector<std::uint64_t> cols;

  std::uint64_t area() const { return rows.size() * cols.size(); }
};

struct Witness {
  Rectangle rect;
  /// The violating color set A (balance) or all colors carrying `prefix`.
  std::vector<std::uint64_t> colors;
  /// Prefix-balance failures only: the offending color prefix.
  std::optional<std::string> prefix;
};

enum class VerifyMode { exhaustive, sampled };
enum class CheckKind { balance, prefix_balance };

struct VerificationReport {
  VerifyMode mode = VerifyMode::exhaustive;
  CheckKind check = CheckKind::balance;
  std::uint64_t samples = 0;  // sampled mode only
  TableParams params;         // s_exp/d_exp as checked
  std::uint64_t row_size = 0;
  std::uint64_t col_size = 0;
  bool passed = true;
  std::uint64_t rectangles_checked = 0;
  Rational worst_ratio{0};
  std::optional<Witness> witness;
};

struct VerifyOptions {
  unsigned threads = 1;
  /// Exhaustive mode refuses more rectangles than this.
  std::uint64_t enumeration_cap = 100'000'000;
};

/// Top-(M/D) color mass.
struct BalanceCheck {
  std::uint64_t set_size = 1;  // M/D
  std::uint64_t d = 1;         // D

  BalanceCheck(unsigned m_exp, unsigned d_exp)
      : set_size(std::uint64_t{1} << (m_exp - d_exp)), d(std::uint64_t{1} << d_exp) {}

  std::uint64_t score(std::span<const std::uint32_t> hist, std::vector<std::uint32_t>& scratch) const {
    if (set_size == 1) return d * *std::max_element(hist.begin(), hist.end());
    if (set_size >= hist.size()) return d * std::accumulate(hist.begin(), hist.end(), std::uint64_t{0});
    scratch.assign(hist.begin(), hist.end());
    std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(set_size) - 1, scratch.end(),
                     std::greater<>());
    return d * std::accumulate(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(set_size), std::uint64_t{0});
  }

  Witness witness(std::span<const std::uint32_t> hist, Rectangle rect) const {
    std::vector<std::uint64_t> order(hist.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return hist[a] > hist[b]; });
    order.resize(std::min<std::uint64_t>(set_size, order.size()));
    std::sort(order.begin(), order.end());
    return {std::move(rect), std::move(order), std::nullopt};
  }
};

/// For every prefix length l in [1, m] the largest count of colors sharing
/// an l-bit prefix, scored as count * 2^l.
struct PrefixCheck {
  unsigned m_exp = 1;

  explicit PrefixCheck(unsigned m) : m_exp(m) {}

  struct Worst {
    std::uint64_t score = 0;
    unsigned length = 0;
    std::uint64_t value = 0;
  };

  Worst worst(std::span<const std::uint32_t> hist, std::vector<std::uint32_t>& scratch) const {
    scratch.assign(hist.begin(), hist.end());
    Worst best;
    for (unsigned len = m_exp; len >= 1; --len) {
      const std::size_t count = std::size_t{1} << len;
      if (len < m_exp)
        for (std::size_t v = 0; v < count; ++v) scratch[v] = scratch[2 * v] + scratch[2 * v + 1];
      for (std::size_t v = 0; v < count; ++v) {
        const std::uint64_t s = std::uint64_t{scratch[v]} << len;
        // Ties keep the shorter prefix, then the smaller value.
        if (s > best.score || (s == best.score && (len < best.length || (len == best.length && v < best.value))))
          best = {s, len, v};
      }
    }
    return best;
  }

  std::uint64_t score(std::span<const std::uint32_t> hist, std::vector<std::uint32_t>& scratch) const {
    return worst(hist, scratch).score;
  }

  Witness witness(std::span<const std::uint32_t> hist, Rectangle rect) const {
    std::vector<std::uint32_t> scratch;
    const Worst w = worst(hist, scratch);
    std::vector<std::uint64_t> colors;
    const unsigned shift = m_exp - w.length;
    for (std::uint64_t c = w.value << shift; c < ((w.value + 1) << shift); ++c) colors.push_back(c);
    return {std::move(rect), std::move(colors), BitString::from_uint(w.value, w.length).to_string()};
  }
};

namespace detail {

/// Partial result of one worker, over a contiguous range of rectangles in
/// the deterministic enumeration order.
struct ScanPart {
  std::uint64_t checked = 0;
  std::uint64_t worst_score = 0;
  std::optional<Witness> witness;
};

inline VerificationReport reduce(VerificationReport base, const std::vector<ScanPart>& parts, std::uint64_t area) {
  std::uint64_t worst = 0;
  for (const auto& part : parts) {
    base.rectangles_checked += part.checked;
    worst = std::max(worst, part.worst_score);
    if (!base.witness && part.witness) base.witness = part.witness;
  }
  base.worst_ratio = area == 0 ? Rational(0) : Rational(static_cast<std::int64_t>(worst), static_cast<std::int64_t>(2 * area));
  base.passed = !base.witness;
  return base;
}

inline void require_histogrammable(const BalancedTable& table) {
  require(table.params().m_exp <= 24, ErrorKind::TooLarge, "verification needs m_exp <= 24");
  require(table.params().n_exp <= 62, ErrorKind::TooLarge, "verification needs n_exp <= 62");
}

template <class Check>
VerificationReport scan_exhaustive(const BalancedTable& table, unsigned row_size, unsigned col_size, const Check& check,
                                   VerificationReport base, const VerifyOptions& opts) {
  require_histogrammable(table);
  const TableParams& p = table.params();
  require(p.n_exp <= 6, ErrorKind::TooLarge, "exhaustive verification needs N <= 64");
  const unsigned n = static_cast<unsigned>(table.rows());
  require(row_size >= 1 && col_size >= 1 && row_size <= n && col_size <= n, ErrorKind::InvalidParams,
          "rectangle sides must be in [1, N]");
  const std::uint64_t row_count = binomial(n, row_size);
  const std::uint64_t col_count = binomial(n, col_size);
  require(row_count <= opts.enumeration_cap && col_count <= opts.enumeration_cap / row_count, ErrorKind::TooLarge,
          "C(N,a) * C(N,b) = " + std::to_string(row_count) + " * " + std::to_string(col_count) +
              " exceeds enumeration cap " + std::to_string(opts.enumeration_cap));

  const auto row_sets = revolving_door_subsets(n, row_size);
  const auto col_sets = row_size == col_size ? row_sets : revolving_door_subsets(n, col_size);
  const std::size_t colors = table.colors();
  const std::uint64_t area = std::uint64_t{row_size} * col_size;

  std::vector<ScanPart> parts(std::max(1U, opts.threads));
  run_parallel(opts.threads, row_sets.size(), [&](unsigned worker, std::uint64_t begin, std::uint64_t end) {
    ScanPart& part = parts[worker];
    // col_hist[c * colors + k]: cells of color k in column c over the current rows.
    std::vector<std::uint32_t> col_hist(std::size_t{n} * colors, 0);
    std::vector<std::uint32_t> hist(colors), scratch;
    for (std::uint64_t ri = begin; ri < end; ++ri) {
      if (ri == begin) {
        for (std::uint64_t r : mask_elements(row_sets[ri]))
          for (unsigned c = 0; c < n; ++c) ++col_hist[c * colors + table.cell(r, c)];
      } else {
        const auto [out, in] = swap_of(row_sets[ri - 1], row_sets[ri]);
        for (unsigned c = 0; c < n; ++c) {
          --col_hist[c * colors + table.cell(out, c)];
          ++col_hist[c * colors + table.cell(in, c)];
        }
      }
      std::fill(hist.begin(), hist.end(), 0);
      for (std::uint64_t c : mask_elements(col_sets[0]))
        for (std::size_t k = 0; k < colors; ++k) hist[k] += col_hist[c * colors + k];
      for (std::size_t ci = 0; ci < col_sets.size(); ++ci) {
        if (ci > 0) {
          const auto [out, in] = swap_of(col_sets[ci - 1], col_sets[ci]);
          for (std::size_t k = 0; k < colors; ++k) hist[k] += col_hist[in * colors + k] - col_hist[out * colors + k];
        }
        const std::uint64_t s = check.score(hist, scratch);
        ++part.checked;
        part.worst_score = std::max(part.worst_score, s);
        if (s > 2 * area && !part.witness)
          part.witness = check.witness(hist, Rectangle{mask_elements(row_sets[ri]), mask_elements(col_sets[ci])});
      }
    }
  });
  base.mode = VerifyMode::exhaustive;
  base.row_size = row_size;
  base.col_size = col_size;
  return reduce(std::move(base), parts, area);
}

template <class Check>
VerificationReport scan_sampled(const BalancedTable& table, std::uint64_t side, const Check& check,
                                std::uint64_t samples, std::uint64_t seed, VerificationReport base,
                                const VerifyOptions& opts) {
  require_histogrammable(table);
  require(samples >= 1, ErrorKind::InvalidParams, "need at least one sample");
  const std::uint64_t n = table.rows();
  require(side >= 1 && side <= n, ErrorKind::InvalidParams, "rectangle side must be in [1, N]");
  const std::size_t colors = table.colors();
  const std::uint64_t area = side * side;
  const unsigned n_exp = table.params().n_exp;

  std::vector<ScanPart> parts(std::max(1U, opts.threads));
  run_parallel(opts.threads, samples, [&](unsigned worker, std::uint64_t begin, std::uint64_t end) {
    ScanPart& part = parts[worker];
    std::vector<std::uint32_t> hist(colors), scratch;
    for (std::uint64_t k = begin; k < end; ++k) {
      Engine rng = make_engine(seed, k);
      Rectangle rect;
      rect.rows = sample_subset(rng, n, side);
      rect.cols = sample_subset(rng, n, side);
      std::fill(hist.begin(), hist.end(), 0);
      if (table.is_explicit()) {
        table.with_cells([&](auto cells) {
          for (std::uint64_t r : rect.rows) {
            const auto* row = cells.data() + (r << n_exp);
            for (std::uint64_t c : rect.cols) ++hist[row[c]];
          }
        });
      } else {
        for (std::uint64_t r : rect.rows)
          for (std::uint64_t c : rect.cols) ++hist[table.cell(r, c)];
      }
      const std::uint64_t s = check.score(hist, scratch);
      ++part.checked;
      part.worst_score = std::max(part.worst_score, s);
      if (s > 2 * area && !part.witness) part.witness = check.witness(hist, std::move(rect));
    }
  });
  base.mode = VerifyMode::sampled;
  base.samples = samples;
  base.row_size = side;
  base.col_size = side;
  return reduce(std::move(base), parts, area);
}

inline VerificationReport base_report(const BalancedTable& table, unsigned s_exp, unsigned d_exp, CheckKind kind) {
  TableParams p = table.params();
  p.s_exp = s_exp;
  p.d_exp = d_exp;
  p.validate();
  VerificationReport r;
  r.params = p;
  r.check = kind;
  return r;
}

}  // namespace detail

/// Balance over every rectangle with exactly `row_size` rows and `col_size`
/// columns, against color sets of size M/D.
inline VerificationReport verify_rectangles(const BalancedTable& table, unsigned row_size, unsigned col_size,
                                            unsigned d_exp, const VerifyOptions& opts = {}) {
  auto base = detail::base_report(table, table.params().s_exp, d_exp, CheckKind::balance);
  return detail::scan_exhaustive(table, row_size, col_size, BalanceCheck(table.params().m_exp, d_exp), std::move(base),
                                 opts);
}

/// Exhaustive (S, D)-balance over all S x S rectangles.
inline VerificationReport verify_exhaustive(const BalancedTable& table, unsigned s_exp, unsigned d_exp,
                                            const VerifyOptions& opts = {}) {
  auto base = detail::base_report(table, s_exp, d_exp, CheckKind::balance);
  require(s_exp < 7, ErrorKind::TooLarge, "exhaustive verification needs S <= 64");
  const unsigned side = 1U << s_exp;
  return detail::scan_exhaustive(table, side, side, BalanceCheck(table.params().m_exp, d_exp), std::move(base), opts);
}

/// (S, D)-balance over `samples` seeded uniformly random S x S rectangles.
inline VerificationReport verify_sampled(const BalancedTable& table, unsigned s_exp, unsigned d_exp,
                                         std::uint64_t samples, std::uint64_t seed, const VerifyOptions& opts = {}) {
  auto base = detail::base_report(table, s_exp, d_exp, CheckKind::balance);
  return detail::scan_sampled(table, base.params.side(), BalanceCheck(table.params().m_exp, d_exp), samples, seed,
                              std::move(base), opts);
}

struct PrefixBalanceMode {
  VerifyMode mode = VerifyMode::exhaustive;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

/// For each checked S x S rectangle and each color prefix v with
/// 1 <= |v| <= m, the number of cells whose color starts with v must not
/// exceed 2 * 2^-|v| * S^2. Holds for every (S, M)-balanced table.
inline VerificationReport verify_prefix_balance(const BalancedTable& table, unsigned s_exp, const PrefixBalanceMode& mode,
                                                const VerifyOptions& opts = {}) {
  const unsigned m = table.params().m_exp;
  auto base = detail::base_report(table, s_exp, m, CheckKind::prefix_balance);
  if (mode.mode == VerifyMode::sampled)
    return detail::scan_sampled(table, base.params.side(), PrefixCheck(m), mode.samples, mode.seed, std::move(base), opts);
  require(s_exp < 7, ErrorKind::TooLarge, "exhaustive verification needs S <= 64");
  const unsigned side = 1U << s_exp;
  return detail::scan_exhaustive(table, side, side, PrefixCheck(m), std::move(base), opts);
}

}  // namespace balext
