#include "fracop/errors.hpp"

namespace fracop {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSingularResolvent: return "SingularResolvent";
    case ErrorKind::kIllConditioned: return "IllConditioned";
    case ErrorKind::kNotPositive: return "NotPositive";
    case ErrorKind::kEigenFailure: return "EigenFailure";
    case ErrorKind::kNotConverged: return "NotConverged";
    case ErrorKind::kInvalidAlpha: return "InvalidAlpha";
    case ErrorKind::kDivergentIntegral: return "DivergentIntegral";
    case ErrorKind::kInvalidParams: return "InvalidParams";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kNonCommuting: return "NonCommuting";
    case ErrorKind::kSingularDeterminant: return "SingularDeterminant";
    case ErrorKind::kAdjugateFormulaFailed: return "AdjugateFormulaFailed";
    case ErrorKind::kSingularDifference: return "SingularDifference";
    case ErrorKind::kBranchCutViolation: return "BranchCutViolation";
    case ErrorKind::kIllConditionedSimilarity: return "IllConditionedSimilarity";
    case ErrorKind::kZeroReference: return "ZeroReference";
    case ErrorKind::kSingularStep: return "SingularStep";
    case ErrorKind::kOracleFailure: return "OracleFailure";
    case ErrorKind::kParse: return "Parse";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace fracop
