#pragma once

// Binary table files, little-endian:
//
//   offset  size  field
//   0       4     magic "BTAB"
//   4       2     format version (1)
//   6       1     backend tag (0 explicit-random, 1 explicit-canonical, 2 keyed)
//   7       4     n_exp, m_exp, s_exp, d_exp (one byte each)
//   11      16    seed (u64, then 8 zero bytes) or key (lo u64, hi u64)
//   27      ...   explicit backends only: N*N row-major cells, 8 bits per
//                 cell when m_exp <= 8, otherwise 16 bits

#include <cstdint>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "balext/error.hpp"
#include "balext/table.hpp"

namespace balext {

inline constexpr std::uint16_t kTableFormatVersion = 1;
inline constexpr std::size_t kTableHeaderSize = 27;

namespace detail {

inline void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= std::uint64_t{in[at + i]} << (8 * i);
  return v;
}

}  // namespace detail

inline std::vector<std::uint8_t> serialize_table(const BalancedTable& t) {
  const TableParams& p = t.params();
  require(p.n_exp <= 255 && p.m_exp <= 255, ErrorKind::InvalidParams, "table files store exponents in one byte");
  std::vector<std::uint8_t> out{'B', 'T', 'A', 'B'};
  detail::put_le(out, kTableFormatVersion, 2);
  out.push_back(static_cast<std::uint8_t>(t.backend()));
  for (unsigned e : {p.n_exp, p.m_exp, p.s_exp, p.d_exp}) out.push_back(static_cast<std::uint8_t>(e));
  if (t.backend() == Backend::Keyed) {
    detail::put_le(out, t.key().lo, 8);
    detail::put_le(out, t.key().hi, 8);
    return out;
  }
  detail::put_le(out, t.seed(), 8);
  detail::put_le(out, 0, 8);
  t.with_cells([&](auto cells) {
    const int width = static_cast<int>(sizeof(cells[0]));
    out.reserve(out.size() + cells.size() * width);
    for (auto c : cells) detail::put_le(out, c, width);
  });
  return out;
}

inline BalancedTable deserialize_table(std::span<const std::uint8_t> in, const TableLimits& limits = {}) {
  require(in.size() >= kTableHeaderSize && in[0] == 'B' && in[1] == 'T' && in[2] == 'A' && in[3] == 'B',
          ErrorKind::Format, "not a BTAB table file");
  const auto version = detail::get_le(in, 4, 2);
  require(version == kTableFormatVersion, ErrorKind::Format, "unsupported table format version " + std::to_string(version));
  const auto tag = in[6];
  require(tag <= 2, ErrorKind::Format, "unknown backend tag " + std::to_string(tag));
  TableParams p{in[7], in[8], in[9], in[10]};
  try {
    p.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Format, std::string("bad table header: ") + e.what());
  }
  const auto backend = static_cast<Backend>(tag);
  if (backend == Backend::Keyed) {
    require(in.size() == kTableHeaderSize, ErrorKind::Format, "trailing bytes after keyed table header");
    return keyed_table(p, Key128{detail::get_le(in, 11, 8), detail::get_le(in, 19, 8)});
  }
  require(p.n_exp <= limits.max_explicit_n_exp && p.m_exp <= 16, ErrorKind::TooLarge,
          "explicit table exceeds size cap");
  const std::uint64_t seed = detail::get_le(in, 11, 8);
  const int width = p.m_exp <= 8 ? 1 : 2;
  const std::uint64_t cells = p.rows() * p.rows();
  require(in.size() == kTableHeaderSize + cells * width, ErrorKind::Format, "table body has wrong length");
  std::vector<std::uint64_t> colors(cells);
  for (std::uint64_t i = 0; i < cells; ++i) colors[i] = detail::get_le(in, kTableHeaderSize + i * width, width);
  try {
    return BalancedTable::from_cells(p, backend, seed, colors);
  } catch (const Error& e) {
    fail(ErrorKind::Format, std::string("bad table body: ") + e.what());
  }
}

/// FNV-1a 64 of the serialized table, as 16 hex digits.
inline std::string table_digest(const BalancedTable& t) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : serialize_table(t)) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = digits[h & 0xF];
  return out;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open '" + path + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  require(!in.bad(), ErrorKind::Io, "read error on '" + path + "'");
  return bytes;
}

inline void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorKind::Io, "write error on '" + path + "'");
}

inline void write_table(const std::string& path, const BalancedTable& t) { write_file_bytes(path, serialize_table(t)); }

inline BalancedTable read_table(const std::string& path, const TableLimits& limits = {}) {
  return deserialize_table(read_file_bytes(path), limits);
}

}  // namespace balext
