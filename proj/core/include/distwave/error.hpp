#pragma once

#include <stdexcept>
#include <string>

namespace distwave {

enum class ErrorCode {
  InvalidArgument,
  ConfigInvalid,
  LevelTooDeep,
  NormViolation,
  NonFinite,
  Framing,
  InfeasibleSchedule,
  MissingMessage,
  DegenerateSpread,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library; callers branch on `code()`.
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

}  // namespace distwave
