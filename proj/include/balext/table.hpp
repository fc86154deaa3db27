#pragma once

// (N, M) tables T : [N] x [N] -> [M] with N = 2^n, M = 2^m.
//
// Three backends:
//   explicit-random     every cell drawn independently and uniformly;
//                       row r uses its own engine seeded with
//                       derive_seed(seed, r), cell c is that engine's c-th
//                       output shifted down to its top m bits.
//   explicit-canonical  lexicographically first balanced table (see
//                       canonical.hpp); cells stored.
//   keyed               nothing stored; the color of (r, c) is computed
//                       from a 128-bit key with the SplitMix64 finalizer
//                       (see keyed_color). Heuristic: no balance guarantee.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "balext/bitstring.hpp"
#include "balext/error.hpp"
#include "balext/params.hpp"
#include "balext/rng.hpp"

namespace balext {

enum class Backend : std::uint8_t {
  ExplicitRandom = 0,
  ExplicitCanonical = 1,
  Keyed = 2,
};

inline std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::ExplicitRandom: return "random";
    case Backend::ExplicitCanonical: return "canonical";
    case Backend::Keyed: return "keyed";
  }
  return "unknown";
}

struct Key128 {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  static Key128 from_seed(std::uint64_t seed) { return {derive_seed(seed, 0x6b6579), derive_seed(seed, 0x6b657a)}; }
  friend bool operator==(const Key128&, const Key128&) = default;
};

struct TableLimits {
  /// Largest n_exp the explicit backends will materialize.
  unsigned max_explicit_n_exp = 12;
  /// Largest N^2 * m_exp (bits of table description) for canonical search.
  std::uint64_t max_canonical_bits = 32;
};

namespace detail {

constexpr std::uint64_t kRowTag = 0x726f77735f746167ULL;
constexpr std::uint64_t kColTag = 0x636f6c735f746167ULL;

inline std::uint64_t keyed_state(const Key128& key, const TableParams& p) {
  std::uint64_t h = mix64(key.lo ^ 0x42544142ULL);
  h = mix64(h ^ key.hi);
  return mix64(h ^ ((std::uint64_t{p.n_exp} << 8) | p.m_exp));
}

inline std::uint64_t keyed_output(const Key128& key, std::uint64_t state, std::uint64_t k) {
  return mix64(state ^ mix64(key.hi + k + 1));
}

/// Little-endian 64-bit limbs of the integer a bit string denotes.
inline std::vector<std::uint64_t> limbs_of(const BitString& bits) {
  std::vector<std::uint64_t> out((bits.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const std::size_t weight = bits.size() - 1 - i;
    if (bits[i]) out[weight / 64] |= std::uint64_t{1} << (weight % 64);
  }
  return out;
}

}  // namespace detail

/// Keyed color for indices given as little-endian limbs; returns the low
/// m_exp bits of out_0 | out_1 << 64 | ... rendered most significant first.
inline BitString keyed_color(const Key128& key, const TableParams& p, std::span<const std::uint64_t> row,
                             std::span<const std::uint64_t> col) {
  std::uint64_t h = detail::keyed_state(key, p);
  for (std::uint64_t w : row) h = mix64(h ^ w);
  h = mix64(h ^ detail::kRowTag);
  for (std::uint64_t w : col) h = mix64(h ^ w);
  h = mix64(h ^ detail::kColTag);
  BitString out(p.m_exp);
  std::uint64_t word = 0;
  for (unsigned bit = 0; bit < p.m_exp; ++bit) {
    if (bit % 64 == 0) word = detail::keyed_output(key, h, bit / 64);
    out.set(p.m_exp - 1 - bit, (word >> (bit % 64)) & 1U);
  }
  return out;
}

/// One cell of the explicit-random table without materializing it.
inline std::uint64_t random_cell(const TableParams& p, std::uint64_t seed, std::uint64_t row, std::uint64_t col) {
  Engine rng = make_engine(seed, row);
  rng.discard(col);
  return uniform_bits(rng, p.m_exp);
}

class BalancedTable;
BalancedTable random_table(const TableParams& p, std::uint64_t seed, const TableLimits& limits = {});

class BalancedTable {
 public:
  BalancedTable() = default;

  const TableParams& params() const { return params_; }
  Backend backend() const { return backend_; }
  std::uint64_t seed() const { return seed_; }
  const Key128& key() const { return key_; }
  bool is_explicit() const { return backend_ != Backend::Keyed; }
  std::uint64_t rows() const { return params_.rows(); }
  std::uint64_t colors() const { return params_.colors(); }

  /// Bytes per stored cell (1 or 2); 0 for keyed tables.
  unsigned cell_width() const { return is_explicit() ? (params_.m_exp <= 8 ? 1 : 2) : 0; }

  std::uint64_t lookup(std::uint64_t row, std::uint64_t col) const {
    require(params_.n_exp < 64, ErrorKind::OutOfRange, "integer lookup needs n_exp < 64; use lookup_bits");
    require(row < rows() && col < rows(), ErrorKind::OutOfRange,
            "cell (" + std::to_string(row) + ", " + std::to_string(col) + ") outside " + std::to_string(rows()) + "x" +
                std::to_string(rows()) + " table");
    return cell(row, col);
  }

  /// Unchecked lookup for hot loops.
  std::uint64_t cell(std::uint64_t row, std::uint64_t col) const {
    if (backend_ == Backend::Keyed) {
      const std::uint64_t r[1] = {row};
      const std::uint64_t c[1] = {col};
      return keyed_color(key_, params_, r, c).to_uint();
    }
    const std::uint64_t idx = (row << params_.n_exp) | col;
    return cell_width() == 1 ? cells8_[idx] : cells16_[idx];
  }

  /// Color of (x, y) as an m_exp-bit string; x, y are n_exp-bit indices
  /// read most significant bit first. Works for any n_exp and m_exp.
  BitString lookup_bits(const BitString& x, const BitString& y) const {
    require(x.size() == params_.n_exp && y.size() == params_.n_exp, ErrorKind::OutOfRange,
            "index strings must have n_exp = " + std::to_string(params_.n_exp) + " bits");
    if (backend_ == Backend::Keyed) {
      const auto r = detail::limbs_of(x);
      const auto c = detail::limbs_of(y);
      return keyed_color(key_, params_, r, c);
    }
    return BitString::from_uint(cell(x.to_uint(), y.to_uint()), params_.m_exp);
  }

  /// Stored cells for explicit tables: calls f with std::span<const uint8_t>
  /// or std::span<const uint16_t>, row-major.
  template <class F>
  decltype(auto) with_cells(F&& f) const {
    require(is_explicit(), ErrorKind::InvalidParams, "keyed tables have no stored cells");
    if (cell_width() == 1) return f(std::span<const std::uint8_t>(cells8_));
    return f(std::span<const std::uint16_t>(cells16_));
  }

  /// Builds an explicit table from row-major colors.
  static BalancedTable from_cells(const TableParams& p, Backend backend, std::uint64_t seed,
                                  std::span<const std::uint64_t> colors) {
    p.validate();
    require(backend != Backend::Keyed, ErrorKind::InvalidParams, "keyed tables have no cells");
    require(p.m_exp <= 16, ErrorKind::TooLarge, "explicit tables support m_exp <= 16");
    require(p.n_exp <= 31 && colors.size() == p.rows() * p.rows(), ErrorKind::InvalidParams,
            "cell count must equal N^2");
    BalancedTable t;
    t.params_ = p;
    t.backend_ = backend;
    t.seed_ = seed;
    if (t.cell_width() == 1)
      t.cells8_.resize(colors.size());
    else
      t.cells16_.resize(colors.size());
    for (std::size_t i = 0; i < colors.size(); ++i) {
      require(colors[i] < p.colors(), ErrorKind::InvalidParams, "color value out of range");
      t.set_cell(i, colors[i]);
    }
    return t;
  }

  static BalancedTable make_keyed(const TableParams& p, const Key128& key) {
    p.validate();
    BalancedTable t;
    t.params_ = p;
    t.backend_ = Backend::Keyed;
    t.key_ = key;
    return t;
  }

  friend BalancedTable random_table(const TableParams& p, std::uint64_t seed, const TableLimits& limits);

  friend bool operator==(const BalancedTable& a, const BalancedTable& b) {
    return a.params_ == b.params_ && a.backend_ == b.backend_ && a.seed_ == b.seed_ && a.key_ == b.key_ &&
           a.cells8_ == b.cells8_ && a.cells16_ == b.cells16_;
  }

 private:
  void set_cell(std::size_t idx, std::uint64_t color) {
    if (cell_width() == 1)
      cells8_[idx] = static_cast<std::uint8_t>(color);
    else
      cells16_[idx] = static_cast<std::uint16_t>(color);
  }

  TableParams params_;
  Backend backend_ = Backend::ExplicitRandom;
  std::uint64_t seed_ = 0;
  Key128 key_;
  std::vector<std::uint8_t> cells8_;
  std::vector<std::uint16_t> cells16_;
};

inline BalancedTable random_table(const TableParams& p, std::uint64_t seed, const TableLimits& limits) {
  p.validate();
  require(p.n_exp <= limits.max_explicit_n_exp, ErrorKind::TooLarge,
          "n_exp = " + std::to_string(p.n_exp) + " exceeds explicit-backend cap " +
              std::to_string(limits.max_explicit_n_exp));
  require(p.m_exp <= 16, ErrorKind::TooLarge, "explicit tables support m_exp <= 16");
  BalancedTable t;
  t.params_ = p;
  t.backend_ = Backend::ExplicitRandom;
  t.seed_ = seed;
  const std::uint64_t n = p.rows();
  if (t.cell_width() == 1)
    t.cells8_.resize(n * n);
  else
    t.cells16_.resize(n * n);
  for (std::uint64_t r = 0; r < n; ++r) {
    Engine rng = make_engine(seed, r);
    for (std::uint64_t c = 0; c < n; ++c) t.set_cell(r * n + c, uniform_bits(rng, p.m_exp));
  }
  return t;
}

inline BalancedTable keyed_table(const TableParams& p, const Key128& key) { return BalancedTable::make_keyed(p, key); }

/// Result of testing S^2 > 3M + 3M ln D + 6SD + 6SD ln(N/S).
struct ExistenceCheck {
  bool holds = false;
  long double lhs = 0;
  long double rhs = 0;
  /// lhs = 2^lhs_log2 exactly.
  unsigned lhs_log2 = 0;
  /// The sides differ by more than the accumulated rounding error, so the
  /// verdict does not depend on floating-point evaluation.
  bool certain = false;
};

/// Takes raw exponents so that degenerate cases (m = 0, d = 0) can be
/// evaluated; requires s <= n and d <= m.
inline ExistenceCheck existence_condition(unsigned n_exp, unsigned m_exp, unsigned s_exp, unsigned d_exp) {
  require(s_exp <= n_exp && d_exp <= m_exp, ErrorKind::InvalidParams, "need s <= n and d <= m");
  require(n_exp <= 4000 && m_exp <= 4000, ErrorKind::TooLarge, "exponents too large to evaluate");
  constexpr long double ln2 = std::numbers::ln2_v<long double>;
  const long double M = std::ldexp(1.0L, static_cast<int>(m_exp));
  const long double S = std::ldexp(1.0L, static_cast<int>(s_exp));
  const long double SD = std::ldexp(1.0L, static_cast<int>(s_exp + d_exp));
  ExistenceCheck out;
  out.lhs_log2 = 2 * s_exp;
  out.lhs = S * S;
  out.rhs = 3 * M + 3 * M * (d_exp * ln2) + 6 * SD + 6 * SD * ((n_exp - s_exp) * ln2);
  out.holds = out.lhs > out.rhs;
  // Every term carries a relative error below 8 ulps of long double.
  const long double tol = 64 * std::numeric_limits<long double>::epsilon() * out.rhs;
  out.certain = std::fabs(out.lhs - out.rhs) > tol;
  if (!out.certain && d_exp == 0 && s_exp == n_exp && m_exp < 60 && s_exp < 30) {
    // rhs = 3M + 6S is an integer here; compare exactly.
    const std::uint64_t lhs_int = std::uint64_t{1} << (2 * s_exp);
    const std::uint64_t rhs_int = 3 * (std::uint64_t{1} << m_exp) + 6 * (std::uint64_t{1} << s_exp);
    out.holds = lhs_int > rhs_int;
    out.certain = true;
  }
  return out;
}

inline ExistenceCheck existence_condition(const TableParams& p) {
  p.validate();
  return existence_condition(p.n_exp, p.m_exp, p.s_exp, p.d_exp);
}

}  // namespace balext
