#pragma once

// Parameter derivation for the balanced-table extractors. All lengths are
// integers: sizes that must not exceed their real-valued target (output
// lengths) are floored, thresholds that must not fall below theirs (S, D,
// log n) are ceiled. log is log2 throughout.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "balext/error.hpp"
#include "balext/rational.hpp"

namespace balext {

/// Exponents of N = 2^n, M = 2^m, S = 2^s, D = 2^d.
struct TableParams {
  unsigned n_exp = 1;
  unsigned m_exp = 1;
  unsigned s_exp = 0;
  unsigned d_exp = 0;

  void validate() const {
    require(n_exp >= 1 && m_exp >= 1, ErrorKind::InvalidParams, "table needs n_exp >= 1 and m_exp >= 1");
    require(s_exp <= n_exp, ErrorKind::InvalidParams, "s_exp must not exceed n_exp");
    require(d_exp <= m_exp, ErrorKind::InvalidParams, "d_exp must not exceed m_exp");
    require(n_exp <= 65535 && m_exp <= 65535, ErrorKind::InvalidParams, "exponents are limited to 65535");
  }

  std::uint64_t rows() const { return checked_pow2(n_exp); }
  std::uint64_t colors() const { return checked_pow2(m_exp); }
  std::uint64_t side() const { return checked_pow2(s_exp); }
  std::uint64_t color_set_size() const { return checked_pow2(m_exp - d_exp); }

  std::string str() const {
    return "n_exp=" + std::to_string(n_exp) + " m_exp=" + std::to_string(m_exp) +
           " s_exp=" + std::to_string(s_exp) + " d_exp=" + std::to_string(d_exp);
  }

  friend bool operator==(const TableParams&, const TableParams&) = default;

 private:
  static std::uint64_t checked_pow2(unsigned e) {
    require(e < 64, ErrorKind::TooLarge, "2^" + std::to_string(e) + " does not fit in 64 bits");
    return std::uint64_t{1} << e;
  }
};

/// How derive_string_params treats a dependency exponent d >= m.
enum class DependencyRounding {
  /// Reject (d must be < m).
  strict,
  /// Use d = m, i.e. demand (S, M)-balance, which implies (S, D)-balance for
  /// every smaller D. Needed at desk-scale n where 8 log n alone exceeds m.
  clamp_to_m,
};

struct StringExtractParams {
  unsigned n = 0;
  Rational sigma;
  Rational alpha;
  unsigned log_n = 0;
  unsigned m_exp = 0;
  unsigned s_exp = 0;
  unsigned d_exp = 0;
  /// ceil(alpha n) + 8 ceil(log n) before any clamping.
  unsigned nominal_d_exp = 0;
  bool d_clamped = false;

  TableParams table_params() const { return {n, m_exp, s_exp, d_exp}; }

  /// (2 sigma - alpha) n - 9 ceil(log n), the nominal output-complexity
  /// guarantee; reported, never enforced.
  double nominal_bound() const {
    return ((Rational(2) * sigma - alpha) * Rational(n)).to_double() - 9.0 * log_n;
  }
};

inline StringExtractParams derive_string_params(unsigned n, const Rational& sigma, const Rational& alpha,
                                                DependencyRounding rounding = DependencyRounding::strict) {
  require(n >= 2, ErrorKind::InvalidParams, "string length n must be at least 2");
  // Clamping also admits alpha = 0, the independent end of a dependency sweep.
  const bool alpha_ok = rounding == DependencyRounding::clamp_to_m ? Rational(0) <= alpha : Rational(0) < alpha;
  require(alpha_ok && alpha < sigma && sigma <= Rational(1), ErrorKind::InvalidParams,
          "need 0 < alpha < sigma <= 1 (got sigma=" + sigma.str() + ", alpha=" + alpha.str() + ")");
  StringExtractParams p;
  p.n = n;
  p.sigma = sigma;
  p.alpha = alpha;
  p.log_n = ceil_log2(n);
  const std::int64_t m = floor_mul(sigma, 2 * static_cast<std::int64_t>(n)) - p.log_n;
  const std::int64_t s = ceil_mul(sigma, n);
  const std::int64_t d = ceil_mul(alpha, n) + 8 * static_cast<std::int64_t>(p.log_n);
  require(m >= 1, ErrorKind::InvalidParams, "m_exp = " + std::to_string(m) + " < 1: n too small for sigma");
  require(s <= n, ErrorKind::InvalidParams, "s_exp exceeds n");
  if (d >= m) {
    require(rounding == DependencyRounding::clamp_to_m, ErrorKind::InvalidParams,
            "d_exp = " + std::to_string(d) + " >= m_exp = " + std::to_string(m) + ": n too small for (sigma, alpha)");
    p.d_clamped = true;
  }
  p.m_exp = static_cast<unsigned>(m);
  p.s_exp = static_cast<unsigned>(s);
  p.nominal_d_exp = static_cast<unsigned>(d);
  p.d_exp = p.d_clamped ? p.m_exp : p.nominal_d_exp;
  return p;
}

struct CondExtractParams {
  unsigned n = 0;
  unsigned s_of_n = 0;
  unsigned alpha_of_n = 0;
  unsigned log_n = 0;
  unsigned m_exp = 0;
  unsigned s_exp = 0;
  unsigned d_exp = 0;  // always m_exp
  /// alpha(n) + 11 ceil(log n); reported only.
  unsigned guarantee_slack = 0;

  TableParams table_params() const { return {n, m_exp, s_exp, d_exp}; }
};

inline CondExtractParams derive_cond_params(unsigned n, unsigned s_of_n, unsigned alpha_of_n) {
  require(n >= 2, ErrorKind::InvalidParams, "string length n must be at least 2");
  const unsigned log_n = ceil_log2(n);
  require(6 * log_n < s_of_n && s_of_n <= n, ErrorKind::InvalidParams,
          "need 6 ceil(log n) = " + std::to_string(6 * log_n) + " < s(n) <= n, got s(n) = " + std::to_string(s_of_n));
  const std::int64_t m = static_cast<std::int64_t>(s_of_n / 2) - 7 * static_cast<std::int64_t>(log_n);
  require(m >= 1, ErrorKind::InvalidParams, "m_exp = " + std::to_string(m) + " < 1: n too small for s(n)");
  CondExtractParams p;
  p.n = n;
  p.s_of_n = s_of_n;
  p.alpha_of_n = alpha_of_n;
  p.log_n = log_n;
  p.m_exp = static_cast<unsigned>(m);
  p.s_exp = (s_of_n + 1) / 2;
  p.d_exp = p.m_exp;
  p.guarantee_slack = alpha_of_n + 11 * log_n;
  return p;
}

struct BlockParams {
  unsigned index = 0;     // i, 1-based
  std::uint64_t n = 0;    // n_i = B^i, also log2 N_i
  std::int64_t m = 0;     // floor(0.97 tau n_i)
  std::int64_t s_exp = 0; // ceil(0.98 tau n_i)
  std::int64_t d_exp = 0; // = m_i
  bool valid = false;     // m_i >= 1

  TableParams table_params() const {
    return {static_cast<unsigned>(n), static_cast<unsigned>(m), static_cast<unsigned>(s_exp),
            static_cast<unsigned>(d_exp)};
  }
};

struct SeqSchedule {
  Rational tau;
  Rational delta;
  std::uint64_t base = 2;
  Rational epsilon;
  Rational alpha;
  std::vector<BlockParams> blocks;  // blocks[k] has index k + 1
  /// Smallest i with m_i >= 1, if any.
  std::optional<unsigned> first_valid_block;
  /// Smallest i from which m is strictly increasing through the last block.
  unsigned increasing_from = 1;
  /// delta >= 1 makes the target rate 1 - delta <= 0.
  bool vacuous_guarantee = false;

  const BlockParams& block(unsigned i) const {
    require(i >= 1 && i <= blocks.size(), ErrorKind::OutOfRange, "block index out of range");
    return blocks[i - 1];
  }
};

inline const Rational kRateOut{97, 100};   // m_i = 0.97 tau n_i
inline const Rational kRateSide{98, 100};  // S_i = 2^(0.98 tau n_i)

inline SeqSchedule derive_seq_schedule(const Rational& tau, const Rational& delta, std::uint64_t base,
                                       unsigned max_block) {
  require(Rational(0) < tau && tau <= Rational(1), ErrorKind::InvalidParams, "need 0 < tau <= 1");
  require(Rational(0) < delta, ErrorKind::InvalidParams, "need delta > 0");
  require(base >= 2, ErrorKind::InvalidParams, "block base B must be >= 2");
  require(max_block >= 1, ErrorKind::InvalidParams, "max_block must be >= 1");

  SeqSchedule sch;
  sch.tau = tau;
  sch.delta = delta;
  sch.base = base;
  sch.epsilon = delta / Rational(4);
  sch.alpha = Rational(1, 3) * sch.epsilon * sch.epsilon * (kRateOut * tau) / Rational(static_cast<std::int64_t>(base));
  sch.vacuous_guarantee = delta >= Rational(1);

  std::uint64_t n_i = 1;
  for (unsigned i = 1; i <= max_block; ++i) {
    require(n_i <= (std::uint64_t{1} << 62) / base, ErrorKind::InvalidParams,
            "block length B^" + std::to_string(i) + " overflows");
    n_i *= base;
    BlockParams b;
    b.index = i;
    b.n = n_i;
    b.m = floor_mul(kRateOut * tau, static_cast<std::int64_t>(n_i));
    b.s_exp = ceil_mul(kRateSide * tau, static_cast<std::int64_t>(n_i));
    b.d_exp = b.m;
    b.valid = b.m >= 1;
    if (b.valid && !sch.first_valid_block) sch.first_valid_block = i;
    sch.blocks.push_back(b);
  }
  sch.increasing_from = max_block;
  while (sch.increasing_from > 1 &&
         sch.blocks[sch.increasing_from - 2].m < sch.blocks[sch.increasing_from - 1].m)
    --sch.increasing_from;
  return sch;
}

}  // namespace balext
