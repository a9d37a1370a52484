#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rrrt {

/// Error categories surfaced by the library. The CLI maps these onto exit codes.
enum class Errc {
  PastTime,
  UnknownLink,
  UnknownTarget,
  NoRoute,
  InvalidTarget,
  InconsistentStats,
  DegenerateProbe,
  DeadlineExpired,
  NoDeliveries,
  UnknownParameter,
  Validation,
  Io,
  Corrupt,
  InvariantViolation,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Throws InvariantViolation when `cond` is false. Always enabled.
inline void ensure(bool cond, const char* what) {
  if (!cond) throw Error(Errc::InvariantViolation, what);
}

}  // namespace rrrt
