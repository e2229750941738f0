#pragma once

#include <stdexcept>
#include <string>

namespace minklab {

enum class ErrorCode {
  NotOrthogonal,
  ClosureOverflow,
  UnknownGroup,
  DegenerateOrbit,
  DegenerateHull,
  OriginNotInterior,
  Unbounded,
  NonpositiveSupport,
  NonpositiveRadial,
  DegenerateSimplex,
  OutsideSimplex,
  InvalidFlag,
  UnknownSymbol,
  NewtonDiverged,
  NonPositive,
  BranchLost,
  NonSpanningGroup,
  BoundaryStuck,
  SampleViolation,
  ConfigInvalid,
  NumericalFailure,
};

const char* error_code_name(ErrorCode code);

/// True for errors caused by a bad configuration rather than a failed computation.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace minklab
