#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fracop/operator_matrix.hpp"

namespace fracop {

/// Analytic scalar function described by its value and by its Taylor
/// coefficients f^(k)(center) / k! for k = 0 .. count-1.
struct ScalarFunction {
  std::function<Complex(Complex)> value;
  std::function<std::vector<Complex>(Complex center, int count)> taylor;
};

/// z -> z^p on the principal branch.
ScalarFunction principal_power(double p);
/// z -> exp(-t z).
ScalarFunction decaying_exponential(double t);

/// Reordered complex Schur form A = Q T Q^H whose diagonal is grouped into
/// contiguous clusters of nearly equal eigenvalues. Functions of A are
/// evaluated blockwise: Taylor expansion about the cluster mean inside a
/// cluster, and the Parlett commutator recurrence (triangular Sylvester
/// solves) between clusters.
class SchurCalculus {
 public:
  explicit SchurCalculus(const Matrix& a, double cluster_tol = 1e-6);

  Matrix apply(const ScalarFunction& f) const;

  Eigen::Index dim() const noexcept { return triangular_.rows(); }
  const Matrix& triangular() const noexcept { return triangular_; }
  const Matrix& unitary() const noexcept { return unitary_; }
  std::size_t cluster_count() const noexcept { return starts_.size(); }
  /// max(1, ||T||_F / smallest gap between eigenvalues of different clusters)
  double separation_condition() const noexcept { return separation_condition_; }

 private:
  Matrix function_of_triangular(const ScalarFunction& f) const;

  Matrix unitary_;
  Matrix triangular_;
  std::vector<Eigen::Index> starts_;  // cluster i covers [starts_[i], starts_[i+1])
  double separation_condition_ = 1.0;
};

enum class PowerMethod { kEigen, kSchurRecurrence };

struct OracleOptions {
  double branch_margin = 1e-6;   // reject |arg lambda| > pi - branch_margin
  double min_magnitude = 1e-12;  // reject |lambda| < min_magnitude
  double eig_cond_cap = 1e8;
  double schur_cond_cap = 1e12;
  double cluster_tol = 1e-6;
  std::optional<PowerMethod> force_method;
};

struct MatrixFunctionResult {
  OperatorMatrix value;
  PowerMethod method = PowerMethod::kEigen;
  double condition_estimate = 1.0;
};

/// Principal power A^z for a matrix whose spectrum avoids the closed negative
/// real axis.
MatrixFunctionResult oracle_power(const OperatorMatrix& a, double z, const OracleOptions& options = {});

/// Shorthand for oracle_power(a, z).value.matrix().
Matrix power(const OperatorMatrix& a, double z);

/// ||X - Y|| / ||Y|| in the spectral norm.
double relative_error(const Matrix& x, const Matrix& y);
inline double relative_error(const OperatorMatrix& x, const OperatorMatrix& y) {
  return relative_error(x.matrix(), y.matrix());
}

}  // namespace fracop
