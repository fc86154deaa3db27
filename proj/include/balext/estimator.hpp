#pragma once

// Computable complexity surrogates: estimate(x) is a code length in bits.
//
// The built-in estimator is a bit-level LZ77 code length. A string of n bits
// costs gamma(n + 1) bits of header plus a greedy parse into tokens:
//
//   literal run   1 flag bit + gamma(len) + len raw bits
//   match         1 flag bit + ceil(log2 p) bits of offset (p = bits already
//                 coded) + gamma(len - kMinMatch + 1)
//
// where gamma(v) = 2 floor(log2 v) + 1 is the Elias gamma length. At each
// position the parser takes the longest earlier match (overlap allowed) of at
// least kMinMatch bits if its token is shorter than the bits it covers, and
// otherwise extends the current literal run by one bit. Only code lengths are
// computed; the parse is a valid, decodable code.

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "balext/bitstring.hpp"
#include "balext/error.hpp"
#include "balext/table_io.hpp"

namespace balext {

class ComplexityEstimator {
 public:
  virtual ~ComplexityEstimator() = default;
  virtual double estimate(const BitString& bits) const = 0;
  virtual std::string name() const = 0;
};

inline std::uint64_t elias_gamma_length(std::uint64_t v) {
  return 2 * static_cast<std::uint64_t>(std::bit_width(v) - 1) + 1;
}

class LzBitEstimator : public ComplexityEstimator {
 public:
  static constexpr unsigned kMinMatch = 16;
  /// Most recent candidates examined per position.
  static constexpr unsigned kMaxChain = 256;

  std::string name() const override { return "lz77-bits"; }

  double estimate(const BitString& bits) const override { return static_cast<double>(code_length(bits)); }

  std::uint64_t code_length(const BitString& bits) const {
    const std::size_t n = bits.size();
    std::uint64_t total = elias_gamma_length(n + 1);
    std::vector<std::uint16_t> window;
    if (n >= kMinMatch) {
      window.resize(n - kMinMatch + 1);
      std::uint32_t w = 0;
      for (std::size_t i = 0; i < n; ++i) {
        w = ((w << 1) | bits[i]) & 0xFFFFU;
        if (i + 1 >= kMinMatch) window[i + 1 - kMinMatch] = static_cast<std::uint16_t>(w);
      }
    }
    // head[w]: latest position with window w; prev[q]: earlier position with the same window.
    std::vector<std::int64_t> head(1U << kMinMatch, -1);
    std::vector<std::int64_t> prev(window.size(), -1);
    auto insert = [&](std::size_t q) {
      if (q < window.size()) {
        prev[q] = head[window[q]];
        head[window[q]] = static_cast<std::int64_t>(q);
      }
    };

    std::uint64_t run = 0;
    auto flush = [&] {
      if (run > 0) total += 1 + elias_gamma_length(run) + run;
      run = 0;
    };
    std::size_t p = 0;
    while (p < n) {
      std::size_t best_len = 0;
      if (p < window.size()) {
        unsigned chain = 0;
        for (std::int64_t q = head[window[p]]; q >= 0 && chain < kMaxChain; q = prev[q], ++chain) {
          std::size_t len = kMinMatch;
          while (p + len < n && bits[static_cast<std::size_t>(q) + len] == bits[p + len]) ++len;
          best_len = std::max(best_len, len);
          if (p + len == n) break;
        }
      }
      if (best_len > 0) {
        const std::uint64_t cost = 1 + ceil_log2(p) + elias_gamma_length(best_len - kMinMatch + 1);
        if (cost < best_len) {
          flush();
          total += cost;
          for (std::size_t q = p; q < p + best_len; ++q) insert(q);
          p += best_len;
          continue;
        }
      }
      insert(p);
      ++run;
      ++p;
    }
    flush();
    return total;
  }
};

/// Compressed size (in bits) reported by an external command that reads raw
/// bytes on stdin and writes the compressed stream to stdout, e.g.
/// "gzip -9 -c". POSIX only; not used by the acceptance suite.
class ExternalCompressorEstimator : public ComplexityEstimator {
 public:
  explicit ExternalCompressorEstimator(std::string command) : command_(std::move(command)) {}

  std::string name() const override { return "external:" + command_; }

  double estimate(const BitString& bits) const override {
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = dir / ("balext-est-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "-" +
                             std::to_string(std::hash<BitString>{}(bits)));
    write_file_bytes(path.string(), bits.to_bytes());
    const std::string cmd = command_ + " < '" + path.string() + "'";
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
    require(pipe != nullptr, ErrorKind::Io, "cannot run '" + command_ + "'");
    std::array<char, 4096> buf{};
    std::uint64_t bytes = 0;
    while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe.get())) bytes += got;
    const int status = pclose(pipe.release());
    std::filesystem::remove(path);
    require(status == 0, ErrorKind::Io, "'" + command_ + "' failed");
    return static_cast<double>(bytes * 8);
  }

 private:
  std::string command_;
};

/// est(x) + est(y) - est(xy); negative values are returned as-is.
inline double dep_estimate(const BitString& x, const BitString& y, const ComplexityEstimator& est) {
  return est.estimate(x) + est.estimate(y) - est.estimate(x + y);
}

}  // namespace balext
