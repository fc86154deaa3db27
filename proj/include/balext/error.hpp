#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace balext {

enum class ErrorKind {
  InvalidParams,
  TooLarge,
  NotFound,
  OutOfRange,
  BlockTooLarge,
  Format,
  Io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParams: return "invalid_params";
    case ErrorKind::TooLarge: return "too_large";
    case ErrorKind::NotFound: return "not_found";
    case ErrorKind::OutOfRange: return "out_of_range";
    case ErrorKind::BlockTooLarge: return "block_too_large";
    case ErrorKind::Format: return "format";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace balext
