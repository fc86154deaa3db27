#pragma once

// Exact rational numbers for parameter derivation. Values stay small
// (user-supplied fractions times block lengths), so int64 with 128-bit
// intermediates is enough; overflow is reported, never wrapped.

#include <charconv>
#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "balext/error.hpp"

namespace balext {

class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1) {  // NOLINT implicit ints
    require(den != 0, ErrorKind::InvalidParams, "rational with zero denominator");
    set(static_cast<__int128>(num), static_cast<__int128>(den));
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  /// Parses "P/Q" or a plain integer "P".
  static Rational parse(std::string_view text) {
    auto parse_int = [&](std::string_view part) {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
      require(ec == std::errc() && ptr == part.data() + part.size() && !part.empty(),
              ErrorKind::InvalidParams, "malformed rational '" + std::string(text) + "'");
      return v;
    };
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text));
    return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    require(b.num_ != 0, ErrorKind::InvalidParams, "rational division by zero");
    return from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  static Rational from_wide(__int128 num, __int128 den) {
    Rational r;
    r.set(num, den);
    return r;
  }

  void set(__int128 num, __int128 den) {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    __int128 a = num < 0 ? -num : num;
    __int128 b = den;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      num /= a;
      den /= a;
    }
    constexpr __int128 lim = INT64_MAX;
    require(num <= lim && num >= -lim && den <= lim, ErrorKind::InvalidParams,
            "rational arithmetic overflow");
    num_ = static_cast<std::int64_t>(num);
    den_ = static_cast<std::int64_t>(den);
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

namespace detail {

inline __int128 floor_div(__int128 a, __int128 b) {
  __int128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::int64_t narrow(__int128 v) {
  require(v <= INT64_MAX && v >= INT64_MIN, ErrorKind::InvalidParams, "integer overflow");
  return static_cast<std::int64_t>(v);
}

}  // namespace detail

/// floor(q * k), exact.
inline std::int64_t floor_mul(const Rational& q, std::int64_t k) {
  return detail::narrow(detail::floor_div(static_cast<__int128>(q.num()) * k, q.den()));
}

/// ceil(q * k), exact.
inline std::int64_t ceil_mul(const Rational& q, std::int64_t k) {
  return -detail::narrow(detail::floor_div(-static_cast<__int128>(q.num()) * k, q.den()));
}

/// q * k rounded to nearest, halves rounded up.
inline std::int64_t round_mul(const Rational& q, std::int64_t k) {
  const __int128 num = 2 * static_cast<__int128>(q.num()) * k + q.den();
  return detail::narrow(detail::floor_div(num, 2 * static_cast<__int128>(q.den())));
}

inline std::int64_t floor(const Rational& q) { return floor_mul(q, 1); }
inline std::int64_t ceil(const Rational& q) { return ceil_mul(q, 1); }

/// ceil(log2 n) for n >= 1.
constexpr unsigned ceil_log2(std::uint64_t n) {
  unsigned bits = 0;
  while (bits < 64 && (std::uint64_t{1} << bits) < n) ++bits;
  return bits;
}

}  // namespace balext
