#pragma once

// Two-source string extractors: f(x, y) = T(x, y) for a balanced table T
// whose parameters are derived from the input length. x selects the row and
// y the column (both read most significant bit first); the color is returned
// as exactly m_exp bits, most significant first.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "balext/bitstring.hpp"
#include "balext/canonical.hpp"
#include "balext/error.hpp"
#include "balext/params.hpp"
#include "balext/table.hpp"

namespace balext {

/// Which backend supplies the table.
struct TableSource {
  enum class Kind { automatic, canonical, random, keyed };

  Kind kind = Kind::automatic;
  std::uint64_t seed = 0;
  Key128 key;
  TableLimits limits;

  /// random(seed) while n_exp fits the explicit cap, keyed(from_seed(seed)) beyond.
  static TableSource automatic(std::uint64_t seed) { return {Kind::automatic, seed, {}, {}}; }
  static TableSource canonical() { return {Kind::canonical, 0, {}, {}}; }
  static TableSource random(std::uint64_t seed) { return {Kind::random, seed, {}, {}}; }
  static TableSource keyed(const Key128& key) { return {Kind::keyed, 0, key, {}}; }

  /// The concrete backend used for tables with these parameters.
  Kind resolve(const TableParams& p) const {
    if (kind != Kind::automatic) return kind;
    return p.n_exp <= limits.max_explicit_n_exp && p.m_exp <= 16 ? Kind::random : Kind::keyed;
  }

  Key128 resolved_key() const { return kind == Kind::keyed ? key : Key128::from_seed(seed); }

  BalancedTable build(const TableParams& p) const {
    switch (resolve(p)) {
      case Kind::canonical: return canonical_table(p, limits);
      case Kind::random: return random_table(p, seed, limits);
      default: return keyed_table(p, resolved_key());
    }
  }

  /// T(x, y) without materializing explicit-random tables.
  BitString color(const TableParams& p, const BitString& x, const BitString& y) const {
    require(x.size() == p.n_exp && y.size() == p.n_exp, ErrorKind::InvalidParams, "inputs must have n_exp bits");
    switch (resolve(p)) {
      case Kind::random:
        require(p.n_exp <= limits.max_explicit_n_exp, ErrorKind::TooLarge,
                "n_exp = " + std::to_string(p.n_exp) + " exceeds explicit-backend cap");
        require(p.m_exp <= 16, ErrorKind::TooLarge, "explicit tables support m_exp <= 16");
        return BitString::from_uint(random_cell(p, seed, x.to_uint(), y.to_uint()), p.m_exp);
      case Kind::keyed: return keyed_table(p, resolved_key()).lookup_bits(x, y);
      default: return build(p).lookup_bits(x, y);
    }
  }
};

namespace detail {

inline void require_same_length(const BitString& x, const BitString& y) {
  require(x.size() == y.size(), ErrorKind::InvalidParams,
          "inputs must have equal length (|x| = " + std::to_string(x.size()) + ", |y| = " + std::to_string(y.size()) + ")");
}

}  // namespace detail

/// Extractor for a fixed length with its table built once.
class TableExtractor {
 public:
  TableExtractor(const TableParams& p, const TableSource& source)
      : params_(p), table_(std::make_shared<const BalancedTable>(source.build(p))) {}

  const TableParams& table_params() const { return params_; }
  const BalancedTable& table() const { return *table_; }

  BitString operator()(const BitString& x, const BitString& y) const {
    detail::require_same_length(x, y);
    return table_->lookup_bits(x, y);
  }

 private:
  TableParams params_;
  std::shared_ptr<const BalancedTable> table_;
};

class StringExtractor : public TableExtractor {
 public:
  StringExtractor(unsigned n, const Rational& sigma, const Rational& alpha, const TableSource& source,
                  DependencyRounding rounding = DependencyRounding::clamp_to_m)
      : StringExtractor(derive_string_params(n, sigma, alpha, rounding), source) {}
  StringExtractor(const StringExtractParams& p, const TableSource& source)
      : TableExtractor(p.table_params(), source), params_(p) {}

  const StringExtractParams& params() const { return params_; }

 private:
  StringExtractParams params_;
};

class CondExtractor : public TableExtractor {
 public:
  CondExtractor(unsigned n, unsigned s_of_n, unsigned alpha_of_n, const TableSource& source)
      : CondExtractor(derive_cond_params(n, s_of_n, alpha_of_n), source) {}
  CondExtractor(const CondExtractParams& p, const TableSource& source)
      : TableExtractor(p.table_params(), source), params_(p) {}

  const CondExtractParams& params() const { return params_; }

 private:
  CondExtractParams params_;
};

/// Output of length m_exp with m = floor(2 sigma n) - ceil(log n). By default
/// a dependency exponent d >= m is clamped to m (see DependencyRounding).
inline BitString extract_string(const BitString& x, const BitString& y, const Rational& sigma, const Rational& alpha,
                                const TableSource& source,
                                DependencyRounding rounding = DependencyRounding::clamp_to_m) {
  detail::require_same_length(x, y);
  const auto p = derive_string_params(static_cast<unsigned>(x.size()), sigma, alpha, rounding);
  return source.color(p.table_params(), x, y);
}

/// Output of length m_exp = floor(s(n)/2) - 7 ceil(log n), table with D = M.
inline BitString extract_conditional(const BitString& x, const BitString& y, unsigned s_of_n, unsigned alpha_of_n,
                                     const TableSource& source) {
  detail::require_same_length(x, y);
  const auto p = derive_cond_params(static_cast<unsigned>(x.size()), s_of_n, alpha_of_n);
  return source.color(p.table_params(), x, y);
}

}  // namespace balext
