#include "fracop/operator_matrix.hpp"

#include "fracop/errors.hpp"

namespace fracop {

OperatorMatrix::OperatorMatrix(Matrix entries, std::string label)
    : entries_(std::move(entries)), label_(std::move(label)) {
  if (entries_.rows() != entries_.cols()) {
    fail(ErrorKind::kDimensionMismatch, "operator matrix must be square, got " +
                                            std::to_string(entries_.rows()) + "x" +
                                            std::to_string(entries_.cols()));
  }
  if (entries_.rows() == 0) fail(ErrorKind::kDimensionMismatch, "operator matrix must have dim >= 1");
  if (!entries_.allFinite()) fail(ErrorKind::kInvalidParams, "operator matrix has non-finite entries");
}

OperatorMatrix::OperatorMatrix(const RealMatrix& entries, std::string label)
    : OperatorMatrix(Matrix(entries.cast<Complex>()), std::move(label)) {}

OperatorMatrix OperatorMatrix::identity(Eigen::Index n, std::string label) {
  return OperatorMatrix(Matrix(Matrix::Identity(n, n)), std::move(label));
}

OperatorMatrix OperatorMatrix::zero(Eigen::Index n, std::string label) {
  return OperatorMatrix(Matrix(Matrix::Zero(n, n)), std::move(label));
}

bool OperatorMatrix::is_hermitian(double tol) const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, entries_.cwiseAbs().maxCoeff());
}

}  // namespace fracop
