#include "minklab/errors.hpp"

namespace minklab {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::ClosureOverflow: return "ClosureOverflow";
    case ErrorCode::UnknownGroup: return "UnknownGroup";
    case ErrorCode::DegenerateOrbit: return "DegenerateOrbit";
    case ErrorCode::DegenerateHull: return "DegenerateHull";
    case ErrorCode::OriginNotInterior: return "OriginNotInterior";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::NonpositiveSupport: return "NonpositiveSupport";
    case ErrorCode::NonpositiveRadial: return "NonpositiveRadial";
    case ErrorCode::DegenerateSimplex: return "DegenerateSimplex";
    case ErrorCode::OutsideSimplex: return "OutsideSimplex";
    case ErrorCode::InvalidFlag: return "InvalidFlag";
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::BranchLost: return "BranchLost";
    case ErrorCode::NonSpanningGroup: return "NonSpanningGroup";
    case ErrorCode::BoundaryStuck: return "BoundaryStuck";
    case ErrorCode::SampleViolation: return "SampleViolation";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::UnknownGroup:
    case ErrorCode::UnknownSymbol:
    case ErrorCode::NotOrthogonal:
      return true;
    default:
      return false;
  }
}

}  // namespace minklab
