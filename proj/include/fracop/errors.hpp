#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "fracop/operator_matrix.hpp"

namespace fracop {

enum class ErrorKind {
  kSingularResolvent,
  kIllConditioned,
  kNotPositive,
  kEigenFailure,
  kNotConverged,
  kInvalidAlpha,
  kDivergentIntegral,
  kInvalidParams,
  kDimensionMismatch,
  kNonCommuting,
  kSingularDeterminant,
  kAdjugateFormulaFailed,
  kSingularDifference,
  kBranchCutViolation,
  kIllConditionedSimilarity,
  kZeroReference,
  kSingularStep,
  kOracleFailure,
  kParse,
  kIo,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can dispatch on it without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when node doubling stops before two successive iterates agree.
class NotConvergedError : public Error {
 public:
  NotConvergedError(const std::string& what, Matrix previous, Matrix last, double distance)
      : Error(ErrorKind::kNotConverged, what),
        previous_(std::move(previous)),
        last_(std::move(last)),
        distance_(distance) {}

  const Matrix& previous() const noexcept { return previous_; }
  const Matrix& last() const noexcept { return last_; }
  double distance() const noexcept { return distance_; }

 private:
  Matrix previous_;
  Matrix last_;
  double distance_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace fracop
