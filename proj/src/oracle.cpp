#include "fracop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "fracop/core.hpp"
#include "fracop/errors.hpp"

namespace fracop {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool same_cluster(Complex x, Complex y, double tol) {
  const double scale = std::max({std::abs(x), std::abs(y), 1e-300});
  return std::abs(x - y) <= tol * scale;
}

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

// Unitary similarity swapping the adjacent diagonal entries k and k+1 of an
// upper-triangular T, accumulated into Q.
void swap_adjacent(Matrix& t, Matrix& q, Eigen::Index k) {
  const Complex a = t(k, k);
  const Complex b = t(k + 1, k + 1);
  const Complex x0 = t(k, k + 1);
  const Complex x1 = b - a;
  const double norm = std::hypot(std::abs(x0), std::abs(x1));
  if (norm == 0.0) return;
  const Complex c = x0 / norm;
  const Complex s = x1 / norm;
  Eigen::Matrix2cd g;
  g << c, -std::conj(s), s, std::conj(c);

  t.middleCols(k, 2) = t.middleCols(k, 2) * g;
  t.middleRows(k, 2) = g.adjoint() * t.middleRows(k, 2);
  q.middleCols(k, 2) = q.middleCols(k, 2) * g;
  t(k + 1, k) = 0.0;
  t(k, k) = b;
  t(k + 1, k + 1) = a;
}

// Solves T11 X - X T22 = C for upper-triangular T11, T22 with disjoint spectra.
Matrix solve_triangular_sylvester(const Matrix& t11, const Matrix& t22, const Matrix& c) {
  const Eigen::Index p = t11.rows();
  const Eigen::Index r = t22.rows();
  Matrix x(p, r);
  for (Eigen::Index col = 0; col < r; ++col) {
    Vector rhs = c.col(col);
    for (Eigen::Index l = 0; l < col; ++l) rhs += x.col(l) * t22(l, col);
    Matrix shifted = t11;
    shifted.diagonal().array() -= t22(col, col);
    x.col(col) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return x;
}

}  // namespace

ScalarFunction principal_power(double p) {
  ScalarFunction f;
  f.value = [p](Complex z) { return std::pow(z, p); };
  f.taylor = [p](Complex center, int count) {
    std::vector<Complex> c(static_cast<std::size_t>(count));
    if (count == 0) return c;
    c[0] = std::pow(center, p);
    for (int k = 1; k < count; ++k) c[k] = c[k - 1] * (p - (k - 1)) / (static_cast<double>(k) * center);
    return c;
  };
  return f;
}

ScalarFunction decaying_exponential(double t) {
  ScalarFunction f;
  f.value = [t](Complex z) { return std::exp(-t * z); };
  f.taylor = [t](Complex center, int count) {
    std::vector<Complex> c(static_cast<std::size_t>(count));
    if (count == 0) return c;
    c[0] = std::exp(-t * center);
    for (int k = 1; k < count; ++k) c[k] = c[k - 1] * (-t) / static_cast<double>(k);
    return c;
  };
  return f;
}

SchurCalculus::SchurCalculus(const Matrix& a, double cluster_tol) {
  Eigen::ComplexSchur<Matrix> schur(a);
  if (schur.info() != Eigen::Success) fail(ErrorKind::kEigenFailure, "complex Schur iteration did not converge");
  triangular_ = schur.matrixT();
  unitary_ = schur.matrixU();
  triangular_.triangularView<Eigen::StrictlyLower>().setZero();

  const Eigen::Index n = triangular_.rows();
  const int ni = static_cast<int>(n);
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  for (int i = 0; i < ni; ++i) {
    for (int j = i + 1; j < ni; ++j) {
      if (same_cluster(triangular_(i, i), triangular_(j, j), cluster_tol)) {
        parent[find_root(parent, j)] = find_root(parent, i);
      }
    }
  }

  // Rank clusters by first appearance on the diagonal, then bubble entries
  // into that order with adjacent unitary swaps.
  std::vector<int> rank_of_root(static_cast<std::size_t>(n), -1);
  std::vector<int> rank(static_cast<std::size_t>(n));
  int next_rank = 0;
  for (int i = 0; i < ni; ++i) {
    const int root = find_root(parent, i);
    if (rank_of_root[root] < 0) rank_of_root[root] = next_rank++;
    rank[i] = rank_of_root[root];
  }
  for (int pass = 0; pass < ni; ++pass) {
    bool swapped = false;
    for (int k = 0; k + 1 < ni; ++k) {
      if (rank[k] > rank[k + 1]) {
        swap_adjacent(triangular_, unitary_, k);
        std::swap(rank[k], rank[k + 1]);
        swapped = true;
      }
    }
    if (!swapped) break;
  }

  for (int i = 0; i < ni; ++i) {
    if (i == 0 || rank[i] != rank[i - 1]) starts_.push_back(i);
  }

  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < ni; ++i) {
    for (int j = i + 1; j < ni; ++j) {
      if (rank[i] != rank[j]) min_gap = std::min(min_gap, std::abs(triangular_(i, i) - triangular_(j, j)));
    }
  }
  if (std::isfinite(min_gap)) {
    separation_condition_ = std::max(1.0, triangular_.norm() / std::max(min_gap, 1e-300));
  }
}

Matrix SchurCalculus::function_of_triangular(const ScalarFunction& f) const {
  const Eigen::Index n = triangular_.rows();
  const std::size_t q = starts_.size();
  std::vector<Eigen::Index> bounds(starts_.begin(), starts_.end());
  bounds.push_back(n);
  auto size = [&](std::size_t i) { return bounds[i + 1] - bounds[i]; };

  Matrix result = Matrix::Zero(n, n);

  for (std::size_t i = 0; i < q; ++i) {
    const Eigen::Index b = bounds[i];
    const Eigen::Index m = size(i);
    const Matrix block = triangular_.block(b, b, m, m);
    if (m == 1) {
      result(b, b) = f.value(block(0, 0));
      continue;
    }
    const Complex center = block.diagonal().mean();
    Matrix nil = block;
    nil.diagonal().array() -= center;

    const int max_terms = static_cast<int>(m) + 120;
    const std::vector<Complex> coeffs = f.taylor(center, max_terms);
    Matrix sum = Matrix::Identity(m, m) * coeffs[0];
    Matrix nil_power = Matrix::Identity(m, m);
    int small_run = 0;
    for (int k = 1; k < max_terms; ++k) {
      nil_power = (nil_power * nil).eval();
      const Matrix term = coeffs[static_cast<std::size_t>(k)] * nil_power;
      sum += term;
      const double tn = term.cwiseAbs().maxCoeff();
      const double sn = sum.cwiseAbs().maxCoeff();
      if (k >= m && tn <= kEps * sn) {
        if (++small_run >= 2) break;
      } else {
        small_run = 0;
      }
      if (!std::isfinite(tn)) fail(ErrorKind::kOracleFailure, "Taylor series diverged inside an eigenvalue cluster");
    }
    result.block(b, b, m, m) = sum;
  }

  for (std::size_t d = 1; d < q; ++d) {
    for (std::size_t i = 0; i + d < q; ++i) {
      const std::size_t j = i + d;
      const Eigen::Index bi = bounds[i], mi = size(i);
      const Eigen::Index bj = bounds[j], mj = size(j);
      const auto tij = triangular_.block(bi, bj, mi, mj);
      Matrix rhs = result.block(bi, bi, mi, mi) * tij - tij * result.block(bj, bj, mj, mj);
      for (std::size_t k = i + 1; k < j; ++k) {
        const Eigen::Index bk = bounds[k], mk = size(k);
        rhs += result.block(bi, bk, mi, mk) * triangular_.block(bk, bj, mk, mj) -
               triangular_.block(bi, bk, mi, mk) * result.block(bk, bj, mk, mj);
      }
      result.block(bi, bj, mi, mj) = solve_triangular_sylvester(
          triangular_.block(bi, bi, mi, mi), triangular_.block(bj, bj, mj, mj), rhs);
    }
  }
  return result;
}

Matrix SchurCalculus::apply(const ScalarFunction& f) const {
  return unitary_ * function_of_triangular(f) * unitary_.adjoint();
}

MatrixFunctionResult oracle_power(const OperatorMatrix& a, double z, const OracleOptions& options) {
  const Eigen::Index n = a.dim();
  const std::string label = a.label() + "^" + std::to_string(z);

  const auto check_branch = [&](Complex lambda) {
    if (std::abs(lambda) < options.min_magnitude ||
        std::abs(std::arg(lambda)) > std::numbers::pi - options.branch_margin) {
      fail(ErrorKind::kBranchCutViolation, "eigenvalue (" + std::to_string(lambda.real()) + ", " +
                                               std::to_string(lambda.imag()) +
                                               ") lies on or near the closed negative real axis");
    }
  };

  const bool want_schur = options.force_method == PowerMethod::kSchurRecurrence;

  if (!want_schur && a.is_hermitian(1e-14)) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
    if (solver.info() != Eigen::Success) fail(ErrorKind::kEigenFailure, "Hermitian eigen-iteration did not converge");
    const Eigen::VectorXd& lambda = solver.eigenvalues();
    Vector mapped(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      check_branch(lambda(i));
      mapped(i) = std::pow(lambda(i), z);
    }
    const Matrix& v = solver.eigenvectors();
    Matrix value = v * mapped.asDiagonal() * v.adjoint();
    return {OperatorMatrix(std::move(value), label), PowerMethod::kEigen, 1.0};
  }

  double eig_condition = std::numeric_limits<double>::infinity();
  if (!want_schur) {
    Eigen::ComplexEigenSolver<Matrix> solver(a.matrix(), true);
    if (solver.info() != Eigen::Success) fail(ErrorKind::kEigenFailure, "complex eigen-iteration did not converge");
    for (Eigen::Index i = 0; i < n; ++i) check_branch(solver.eigenvalues()(i));
    const Matrix& v = solver.eigenvectors();
    Eigen::BDCSVD<Matrix> svd(v);
    const auto& sv = svd.singularValues();
    eig_condition = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
    if (eig_condition <= options.eig_cond_cap || options.force_method == PowerMethod::kEigen) {
      Vector mapped(n);
      for (Eigen::Index i = 0; i < n; ++i) mapped(i) = std::pow(solver.eigenvalues()(i), z);
      const Matrix vd = v * mapped.asDiagonal();
      Matrix value = v.transpose().partialPivLu().solve(vd.transpose()).transpose();
      return {OperatorMatrix(std::move(value), label), PowerMethod::kEigen, std::max(1.0, eig_condition)};
    }
  }

  SchurCalculus schur(a.matrix(), options.cluster_tol);
  for (Eigen::Index i = 0; i < n; ++i) check_branch(schur.triangular()(i, i));
  if (schur.separation_condition() > options.schur_cond_cap) {
    fail(ErrorKind::kIllConditionedSimilarity,
         "eigenvector condition " + std::to_string(eig_condition) + " and Schur separation condition " +
             std::to_string(schur.separation_condition()) + " both exceed their caps");
  }
  Matrix value = schur.apply(principal_power(z));
  return {OperatorMatrix(std::move(value), label), PowerMethod::kSchurRecurrence, schur.separation_condition()};
}

Matrix power(const OperatorMatrix& a, double z) { return oracle_power(a, z).value.matrix(); }

double relative_error(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    fail(ErrorKind::kDimensionMismatch, "relative_error operands differ in shape");
  }
  const double ref = spectral_norm(y);
  if (!(ref > 0.0)) fail(ErrorKind::kZeroReference, "relative_error reference has zero norm");
  return spectral_norm(Matrix(x - y)) / ref;
}

}  // namespace fracop
