#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dcl {

enum class ErrorCode {
  SelfLoop,
  DuplicateEdge,
  VertexOutOfRange,
  ParameterOutOfRange,
  RootNotBracketed,
  EigensolverFailure,
  ZeroVector,
  IllConditionedInterpolation,
  NotUndirected,
  Disconnected,
  NotMarginal,
  MultiplicityAboveOne,
  ZeroOffdiagonal,
  NoBracket,
  StepMismatch,
  DimensionMismatch,
  EpsilonOutOfRange,
  FitDidNotConverge,
  WindowTooShort,
  ParseError,
  InvalidGraph,
  CapacityExceeded,
  UnknownSession,
  InvalidParameter,
};

std::string_view to_string(ErrorCode code);

// Single exception type; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dcl
