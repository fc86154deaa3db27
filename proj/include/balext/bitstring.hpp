#pragma once

// Finite binary strings. Bit 0 is the first (most significant) bit: the
// string "0…01" of length n has integer value 1, and bytes are packed most
// significant bit first.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "balext/error.hpp"

namespace balext {

class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t length) : words_((length + 63) / 64, 0), size_(length) {}

  /// The low `length` bits of `value`, most significant first.
  static BitString from_uint(std::uint64_t value, std::size_t length) {
    require(length <= 64, ErrorKind::OutOfRange, "from_uint supports at most 64 bits");
    BitString out(length);
    for (std::size_t i = 0; i < length; ++i) out.set(i, (value >> (length - 1 - i)) & 1U);
    return out;
  }

  static BitString from_string(std::string_view text) {
    BitString out;
    for (char ch : text) {
      require(ch == '0' || ch == '1', ErrorKind::InvalidParams, "bit string must contain only 0/1");
      out.push_back(ch == '1');
    }
    return out;
  }

  /// Reads `bit_count` bits (default: all) from raw bytes.
  static BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count) {
    require(bit_count <= bytes.size() * 8, ErrorKind::OutOfRange, "not enough bytes for requested bits");
    BitString out(bit_count);
    for (std::size_t i = 0; i < bit_count; ++i) out.set(i, (bytes[i / 8] >> (7 - i % 8)) & 1U);
    return out;
  }
  static BitString from_bytes(std::span<const std::uint8_t> bytes) {
    return from_bytes(bytes, bytes.size() * 8);
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool operator[](std::size_t i) const { return (words_[i / 64] >> (63 - i % 64)) & 1U; }

  bool at(std::size_t i) const {
    require(i < size_, ErrorKind::OutOfRange, "bit index out of range");
    return (*this)[i];
  }

  void set(std::size_t i, bool bit) {
    const std::uint64_t mask = std::uint64_t{1} << (63 - i % 64);
    if (bit)
      words_[i / 64] |= mask;
    else
      words_[i / 64] &= ~mask;
  }

  void push_back(bool bit) {
    if (size_ % 64 == 0) words_.push_back(0);
    ++size_;
    set(size_ - 1, bit);
  }

  void append(const BitString& other) {
    for (std::size_t i = 0; i < other.size_; ++i) push_back(other[i]);
  }

  BitString slice(std::size_t offset, std::size_t length) const {
    require(offset + length <= size_, ErrorKind::OutOfRange, "slice out of range");
    BitString out(length);
    for (std::size_t i = 0; i < length; ++i) out.set(i, (*this)[offset + i]);
    return out;
  }

  /// Integer value, most significant bit first.
  std::uint64_t to_uint() const {
    require(size_ <= 64, ErrorKind::OutOfRange, "bit string longer than 64 bits");
    return size_ == 0 ? 0 : words_[0] >> (64 - size_);
  }

  /// Packed words, bit 0 in the top bit of word 0; unused tail bits are zero.
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  std::vector<std::uint8_t> to_bytes() const {
    std::vector<std::uint8_t> out((size_ + 7) / 8, 0);
    for (std::size_t i = 0; i < size_; ++i)
      if ((*this)[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
    return out;
  }

  std::string to_string() const {
    std::string out(size_, '0');
    for (std::size_t i = 0; i < size_; ++i)
      if ((*this)[i]) out[i] = '1';
    return out;
  }

  /// Hex of to_bytes() (trailing partial byte zero-padded).
  std::string to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (std::uint8_t b : to_bytes()) {
      out.push_back(digits[b >> 4]);
      out.push_back(digits[b & 0xF]);
    }
    return out;
  }

  friend BitString operator+(BitString a, const BitString& b) {
    a.append(b);
    return a;
  }

  friend bool operator==(const BitString& a, const BitString& b) {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }
  friend std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
    if (auto c = a.size_ <=> b.size_; c != 0) return c;
    return a.words_ <=> b.words_;
  }

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

}  // namespace balext

template <>
struct std::hash<balext::BitString> {
  std::size_t operator()(const balext::BitString& b) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ b.size();
    for (std::uint64_t w : b.words()) {
      h ^= w;
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};
