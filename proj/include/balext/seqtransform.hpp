#pragma once

// Block transformer for infinite sequences (as finite prefixes).
//
// x and y are cut into consecutive blocks x_1 x_2 ... of lengths n_i = B^i;
// block i emits z_i = T_i(x_i, y_i), an m_i-bit color of a table with
// N_i = 2^n_i, M_i = D_i = 2^m_i, S_i = 2^ceil(0.98 tau n_i). Blocks with
// m_i < 1 consume their input and emit nothing. The output is z_1 z_2 ...
//
// Output bit p inside block i is computed from the input prefixes
// x[0, sum_{j<=i} n_j) and y[0, sum_{j<=i} n_j): a finite read set that
// depends only on the schedule and p, never on stream contents.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "balext/bitstring.hpp"
#include "balext/error.hpp"
#include "balext/params.hpp"
#include "balext/rng.hpp"
#include "balext/table.hpp"
#include "balext/verify.hpp"

namespace balext {

class BitStream {
 public:
  virtual ~BitStream() = default;

  /// Bit at 0-based position; repeated reads return the same bit.
  virtual bool bit(std::uint64_t pos) const = 0;

  virtual BitString read(std::uint64_t offset, std::uint64_t length) const {
    BitString out(length);
    for (std::uint64_t i = 0; i < length; ++i) out.set(i, bit(offset + i));
    return out;
  }
};

/// A finite buffer; reading past its end is an error.
class BufferStream : public BitStream {
 public:
  explicit BufferStream(BitString bits) : bits_(std::move(bits)) {}

  bool bit(std::uint64_t pos) const override {
    require(pos < bits_.size(), ErrorKind::Io,
            "input stream exhausted: bit " + std::to_string(pos) + " requested, " + std::to_string(bits_.size()) +
                " available");
    return bits_[pos];
  }

  std::uint64_t size() const { return bits_.size(); }

 private:
  BitString bits_;
};

/// Pseudorandom infinite stream: bit p is bit (p mod 64) of
/// mix64(derive_seed(seed, p / 64)), most significant first.
class SeededStream : public BitStream {
 public:
  explicit SeededStream(std::uint64_t seed) : seed_(seed) {}

  bool bit(std::uint64_t pos) const override {
    return (mix64(derive_seed(seed_, pos / 64)) >> (63 - pos % 64)) & 1U;
  }

 private:
  std::uint64_t seed_;
};

/// Records every position read from the wrapped stream.
class CountingStream : public BitStream {
 public:
  explicit CountingStream(const BitStream& inner) : inner_(inner) {}

  bool bit(std::uint64_t pos) const override {
    {
      std::lock_guard lock(mutex_);
      reads_.insert(pos);
    }
    return inner_.bit(pos);
  }

  std::set<std::uint64_t> positions() const {
    std::lock_guard lock(mutex_);
    return reads_;
  }

  void reset() {
    std::lock_guard lock(mutex_);
    reads_.clear();
  }

 private:
  const BitStream& inner_;
  mutable std::mutex mutex_;
  mutable std::set<std::uint64_t> reads_;
};

/// Input and output offsets of every block.
struct BlockLayout {
  SeqSchedule schedule;
  /// Smallest i with m_i >= 1; 0 if no block emits.
  unsigned first_block = 0;
  std::vector<std::uint64_t> input_offset;   // [i-1] = sum_{j<i} n_j
  std::vector<std::uint64_t> output_offset;  // [i-1] = sum_{j<i, m_j>=1} m_j

  explicit BlockLayout(SeqSchedule sch) : schedule(std::move(sch)) {
    first_block = schedule.first_valid_block.value_or(0);
    std::uint64_t in = 0, out = 0;
    for (const auto& b : schedule.blocks) {
      input_offset.push_back(in);
      output_offset.push_back(out);
      in += b.n;
      if (b.valid) out += static_cast<std::uint64_t>(b.m);
    }
  }

  unsigned block_count() const { return static_cast<unsigned>(schedule.blocks.size()); }

  /// Output bits produced by all blocks of the schedule.
  std::uint64_t total_output() const {
    const auto& last = schedule.blocks.back();
    return output_offset.back() + (last.valid ? static_cast<std::uint64_t>(last.m) : 0);
  }

  /// sum_{j <= i} n_j.
  std::uint64_t input_end(unsigned i) const { return input_offset[i - 1] + schedule.block(i).n; }

  /// Emitting block containing output position `pos`.
  unsigned block_of(std::uint64_t pos) const {
    require(pos < total_output(), ErrorKind::OutOfRange,
            "output position " + std::to_string(pos) + " beyond the schedule's " + std::to_string(total_output()) +
                " bits");
    auto it = std::upper_bound(output_offset.begin(), output_offset.end(), pos);
    unsigned i = static_cast<unsigned>(it - output_offset.begin());
    // Blocks sharing an offset emit nothing except the last of them.
    while (!schedule.block(i).valid) --i;
    return i;
  }
};

struct TransformPolicy {
  std::uint64_t seed = 0;
  TableLimits limits;
  /// Use keyed tables for blocks beyond the explicit cap.
  bool allow_keyed = true;
  /// Rectangles sampled when an explicit block table is built; 0 disables.
  std::uint64_t verify_samples = 64;
};

/// Construction record of one block table.
struct BlockTableInfo {
  unsigned index = 0;
  Backend backend = Backend::ExplicitRandom;
  std::uint64_t seed = 0;
  /// Sampled (S_i, M_i)-balance of explicit tables; empty for keyed ones.
  std::optional<bool> sampled_balance;
  std::optional<Rational> worst_ratio;
};

class SequenceTransformer {
 public:
  SequenceTransformer(SeqSchedule schedule, TransformPolicy policy)
      : layout_(std::move(schedule)), policy_(std::move(policy)) {}

  const BlockLayout& layout() const { return layout_; }
  const TransformPolicy& policy() const { return policy_; }

  bool output_bit(const BitStream& x, const BitStream& y, std::uint64_t pos) const {
    const unsigned i = layout_.block_of(pos);
    const std::uint64_t end = layout_.input_end(i);
    const BitString xs = x.read(0, end);
    const BitString ys = y.read(0, end);
    return block_output(i, xs, ys)[pos - layout_.output_offset[i - 1]];
  }

  BitString transform_prefix(const BitStream& x, const BitStream& y, std::uint64_t out_len) const {
    BitString out;
    if (out_len == 0) return out;
    const unsigned last = layout_.block_of(out_len - 1);
    const std::uint64_t end = layout_.input_end(last);
    const BitString xs = x.read(0, end);
    const BitString ys = y.read(0, end);
    for (unsigned i = layout_.first_block; i <= last; ++i) {
      if (!layout_.schedule.block(i).valid) continue;
      out.append(block_output(i, xs, ys));
    }
    return out.slice(0, out_len);
  }

  /// Bits read from each input stream to produce `out_len` output bits.
  std::uint64_t input_bits_per_stream(std::uint64_t out_len) const {
    return out_len == 0 ? 0 : layout_.input_end(layout_.block_of(out_len - 1));
  }

  /// The table of block i, built at most once.
  std::shared_ptr<const BalancedTable> block_table(unsigned i) const {
    const BlockParams& b = layout_.schedule.block(i);
    require(b.valid, ErrorKind::InvalidParams, "block " + std::to_string(i) + " emits no output");
    std::lock_guard lock(mutex_);
    auto it = tables_.find(i);
    if (it != tables_.end()) return it->second;
    const TableParams p = b.table_params();
    const std::uint64_t seed = derive_seed(policy_.seed, i);
    BlockTableInfo info{i, Backend::ExplicitRandom, seed, std::nullopt, std::nullopt};
    std::shared_ptr<const BalancedTable> table;
    if (p.n_exp <= policy_.limits.max_explicit_n_exp && p.m_exp <= 16) {
      table = std::make_shared<const BalancedTable>(random_table(p, seed, policy_.limits));
      if (policy_.verify_samples > 0) {
        const auto report = verify_sampled(*table, p.s_exp, p.d_exp, policy_.verify_samples, seed);
        info.sampled_balance = report.passed;
        info.worst_ratio = report.worst_ratio;
      }
    } else {
      require(policy_.allow_keyed, ErrorKind::BlockTooLarge,
              "block " + std::to_string(i) + " needs a " + std::to_string(b.n) + "-bit explicit table");
      info.backend = Backend::Keyed;
      table = std::make_shared<const BalancedTable>(keyed_table(p, Key128::from_seed(seed)));
    }
    infos_[i] = info;
    tables_.emplace(i, table);
    return table;
  }

  /// Construction records of the block tables built so far, by index.
  std::vector<BlockTableInfo> built_tables() const {
    std::lock_guard lock(mutex_);
    std::vector<BlockTableInfo> out;
    for (const auto& [i, info] : infos_) out.push_back(info);
    return out;
  }

 private:
  BitString block_output(unsigned i, const BitString& xs, const BitString& ys) const {
    const auto& b = layout_.schedule.block(i);
    const std::uint64_t off = layout_.input_offset[i - 1];
    return block_table(i)->lookup_bits(xs.slice(off, b.n), ys.slice(off, b.n));
  }

  BlockLayout layout_;
  TransformPolicy policy_;
  mutable std::mutex mutex_;
  mutable std::map<unsigned, std::shared_ptr<const BalancedTable>> tables_;
  mutable std::map<unsigned, BlockTableInfo> infos_;
};

/// Smallest block count whose schedule produces at least `out_len` bits.
inline unsigned blocks_for_output(const Rational& tau, const Rational& delta, std::uint64_t base, std::uint64_t out_len,
                                  unsigned max_blocks = 62) {
  for (unsigned k = 1; k <= max_blocks; ++k) {
    const auto sch = derive_seq_schedule(tau, delta, base, k);
    if (BlockLayout(sch).total_output() >= out_len) return k;
  }
  fail(ErrorKind::InvalidParams, "output length " + std::to_string(out_len) + " needs too many blocks");
}

inline BitString transform_prefix(const BitStream& x, const BitStream& y, const SeqSchedule& schedule,
                                  std::uint64_t out_len, const TransformPolicy& policy) {
  return SequenceTransformer(schedule, policy).transform_prefix(x, y, out_len);
}

inline bool output_bit(const BitStream& x, const BitStream& y, const SeqSchedule& schedule, std::uint64_t pos,
                       const TransformPolicy& policy) {
  return SequenceTransformer(schedule, policy).output_bit(x, y, pos);
}

}  // namespace balext
