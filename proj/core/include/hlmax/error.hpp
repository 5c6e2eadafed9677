#pragma once

#include <stdexcept>
#include <string>

namespace hlmax {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  Degenerate,
  Singular,
  IllConditioned,
  GeometryMismatch,
  DomainTooSmall,
  NotIsotropic,
  Unsupported,
  Parse,
  Config,
  Numerical,
};

const char* to_string(ErrorCode code) noexcept;

/// All library failures are reported through this type; `code()` lets callers
/// (the CLI in particular) map failures to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace hlmax
