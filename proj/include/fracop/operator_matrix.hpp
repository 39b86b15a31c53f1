#pragma once

#include <complex>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace fracop {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

/// A dense square complex matrix standing in for a discretized operator.
///
/// The entry grid is always n x n with finite values; both are checked on
/// construction, so any OperatorMatrix in circulation satisfies them.
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  explicit OperatorMatrix(Matrix entries, std::string label = {});
  explicit OperatorMatrix(const RealMatrix& entries, std::string label = {});

  static OperatorMatrix identity(Eigen::Index n, std::string label = "I");
  static OperatorMatrix zero(Eigen::Index n, std::string label = "0");

  Eigen::Index dim() const noexcept { return entries_.rows(); }
  const Matrix& matrix() const noexcept { return entries_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  const std::string& label() const noexcept { return label_; }
  OperatorMatrix with_label(std::string label) const { return OperatorMatrix(entries_, std::move(label)); }

  bool is_hermitian(double tol = 0.0) const;

 private:
  Matrix entries_;
  std::string label_;
};

}  // namespace fracop
