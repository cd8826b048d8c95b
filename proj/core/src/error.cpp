#include "distwave/error.hpp"

namespace distwave {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::ConfigInvalid: return "config-invalid";
    case ErrorCode::LevelTooDeep: return "level-too-deep";
    case ErrorCode::NormViolation: return "norm-violation";
    case ErrorCode::NonFinite: return "non-finite";
    case ErrorCode::Framing: return "framing";
    case ErrorCode::InfeasibleSchedule: return "infeasible-schedule";
    case ErrorCode::MissingMessage: return "missing-message";
    case ErrorCode::DegenerateSpread: return "degenerate-spread";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace distwave
