#include "fracop/block3.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fracop/core.hpp"
#include "fracop/errors.hpp"
#include "fracop/oracle.hpp"

namespace fracop {

namespace {

constexpr double kPi = std::numbers::pi;

Matrix eye(Eigen::Index n) { return Matrix::Identity(n, n); }
Matrix zeros(Eigen::Index n) { return Matrix::Zero(n, n); }

BlockGrid grid_of(const std::array<std::array<Matrix, 3>, 3>& m) {
  BlockGrid g;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) g[i][j] = OperatorMatrix(m[i][j]);
  }
  return g;
}

// Cofactor expansion of sI + Lambda for commuting entries, no checks.
struct RawAdjugate {
  std::array<std::array<Matrix, 3>, 3> adj;
  Matrix det;
};

RawAdjugate raw_adjugate(const BlockOperator3& b, double s) {
  auto a = [&](int i, int j) -> const Matrix& { return b.entry(i - 1, j - 1).matrix(); };
  auto shifted = [&](int i) {
    Matrix m = a(i, i);
    m.diagonal().array() += s;
    return m;
  };
  const Matrix s11 = shifted(1), s22 = shifted(2), s33 = shifted(3);

  RawAdjugate r;
  auto& adj = r.adj;
  adj[0][0] = s22 * s33 - a(2, 3) * a(3, 2);
  adj[0][1] = a(3, 2) * a(1, 3) - a(1, 2) * s33;
  adj[0][2] = a(1, 2) * a(2, 3) - a(1, 3) * s22;
  adj[1][0] = a(2, 3) * a(3, 1) - a(2, 1) * s33;
  adj[1][1] = s11 * s33 - a(1, 3) * a(3, 1);
  adj[1][2] = a(2, 1) * a(1, 3) - a(2, 3) * s11;
  adj[2][0] = a(2, 1) * a(3, 2) - a(3, 1) * s22;
  adj[2][1] = a(3, 1) * a(1, 2) - a(3, 2) * s11;
  adj[2][2] = s22 * s11 - a(2, 1) * a(1, 2);
  r.det = s11 * s22 * s33 - a(2, 1) * a(1, 2) * s33 - a(3, 1) * a(1, 3) * s22 - a(2, 3) * a(3, 2) * s11 +
          a(2, 1) * a(1, 3) * a(3, 2) + a(3, 1) * a(1, 2) * a(2, 3);
  return r;
}

// Assembled R = adj * det^{-1}, with the residual check applied.
Matrix checked_resolvent(const BlockOperator3& b, double s, double residual_tol, double* residual_out) {
  const Eigen::Index n = b.n();
  RawAdjugate raw = raw_adjugate(b, s);
  Eigen::PartialPivLU<Matrix> lu(raw.det);
  if (!(lu.rcond() > 16 * std::numeric_limits<double>::epsilon())) {
    fail(ErrorKind::kSingularDeterminant, "determinant expression is singular at s = " + std::to_string(s));
  }
  const Matrix det_inv = lu.inverse();
  Matrix r(3 * n, 3 * n);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r.block(i * n, j * n, n, n) = raw.adj[i][j] * det_inv;
  }
  Matrix shifted = b.assembled().matrix();
  shifted.diagonal().array() += s;
  const double residual = spectral_norm(Matrix(shifted * r - eye(3 * n)));
  if (!(residual <= residual_tol)) {
    fail(ErrorKind::kAdjugateFormulaFailed, "adjugate resolvent residual " + std::to_string(residual) +
                                                " exceeds " + std::to_string(residual_tol) +
                                                " at s = " + std::to_string(s));
  }
  if (residual_out) *residual_out = residual;
  return r;
}

void require_commuting(const BlockOperator3& b, const AdjugateOptions& options) {
  const double tol = effective_commutation_tol(b, options);
  const CommutationReport report = commutation_report(b);
  if (report.max_commutator_norm > tol) {
    const auto& [p, q] = report.worst_pair;
    fail(ErrorKind::kNonCommuting, "entries (" + std::to_string(p.first + 1) + "," + std::to_string(p.second + 1) +
                                       ") and (" + std::to_string(q.first + 1) + "," +
                                       std::to_string(q.second + 1) + ") have commutator norm " +
                                       std::to_string(report.max_commutator_norm));
  }
}

}  // namespace

BlockOperator3 BlockOperator3::assemble(BlockGrid entries) {
  const Eigen::Index n = entries[0][0].dim();
  if (n == 0) fail(ErrorKind::kDimensionMismatch, "block entries must be non-empty");
  BlockOperator3 b;
  b.n_ = n;
  Matrix full(3 * n, 3 * n);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (entries[i][j].dim() != n) {
        fail(ErrorKind::kDimensionMismatch, "block entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                                ") is " + std::to_string(entries[i][j].dim()) + "x" +
                                                std::to_string(entries[i][j].dim()) + ", expected " +
                                                std::to_string(n));
      }
      full.block(i * n, j * n, n, n) = entries[i][j].matrix();
    }
  }
  b.entries_ = std::move(entries);
  b.assembled_ = OperatorMatrix(std::move(full), "Lambda");
  return b;
}

BlockOperator3 BlockOperator3::from_assembled(const OperatorMatrix& assembled) {
  const Eigen::Index size = assembled.dim();
  if (size == 0 || size % 3 != 0) fail(ErrorKind::kDimensionMismatch, "assembled size must be a positive multiple of 3");
  const Eigen::Index n = size / 3;
  BlockGrid g;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) g[i][j] = OperatorMatrix(Matrix(assembled.matrix().block(i * n, j * n, n, n)));
  }
  return assemble(std::move(g));
}

BlockOperator3 lambda1(const OperatorMatrix& a) {
  const Eigen::Index n = a.dim();
  const Matrix& m = a.matrix();
  return assemble(grid_of({{{m, zeros(n), zeros(n)}, {zeros(n), m, zeros(n)}, {eye(n), zeros(n), m}}}));
}

BlockOperator3 lambda312(const OperatorMatrix& a) {
  const Eigen::Index n = a.dim();
  const Matrix root2 = 2.0 * power(a, 0.5);
  return assemble(
      grid_of({{{zeros(n), Matrix(-eye(n)), zeros(n)}, {a.matrix(), root2, zeros(n)}, {zeros(n), zeros(n), root2}}}));
}

BlockOperator3 lambda3(const OperatorMatrix& a1, const OperatorMatrix& a2, const OperatorMatrix& a3) {
  const Eigen::Index n = a1.dim();
  if (a2.dim() != n || a3.dim() != n) fail(ErrorKind::kDimensionMismatch, "A1, A2, A3 must share one dimension");
  return assemble(grid_of(
      {{{a1.matrix(), zeros(n), zeros(n)}, {zeros(n), a2.matrix(), zeros(n)}, {eye(n), zeros(n), a3.matrix()}}}));
}

BlockOperator3 lambda4(const OperatorMatrix& a) {
  const Eigen::Index n = a.dim();
  const Matrix& m = a.matrix();
  return assemble(
      grid_of({{{zeros(n), zeros(n), Matrix(-eye(n))}, {zeros(n), m, zeros(n)}, {m, zeros(n), zeros(n)}}}));
}

CommutationReport commutation_report(const BlockOperator3& b) {
  CommutationReport report;
  for (int p = 0; p < 9; ++p) {
    for (int q = p + 1; q < 9; ++q) {
      const Matrix& x = b.entry(p / 3, p % 3).matrix();
      const Matrix& y = b.entry(q / 3, q % 3).matrix();
      const double norm = spectral_norm(Matrix(x * y - y * x));
      if (norm > report.max_commutator_norm) {
        report.max_commutator_norm = norm;
        report.worst_pair = {{p / 3, p % 3}, {q / 3, q % 3}};
      }
    }
  }
  return report;
}

double effective_commutation_tol(const BlockOperator3& b, const AdjugateOptions& options) {
  if (options.commutation_tol >= 0.0) return options.commutation_tol;
  double max_norm = 0.0;
  for (const auto& row : b.entries()) {
    for (const auto& e : row) max_norm = std::max(max_norm, spectral_norm(e));
  }
  return 1e-10 * max_norm;
}

AdjugateResolvent adjugate_resolvent(const BlockOperator3& b, double s, const AdjugateOptions& options) {
  require_commuting(b, options);
  AdjugateResolvent out;
  const Matrix r = checked_resolvent(b, s, options.residual_tol, &out.residual);
  out.value = BlockOperator3::from_assembled(OperatorMatrix(r));
  return out;
}

Quadrature<BlockOperator3> block_fracpow_quadrature(const BlockOperator3& b, double alpha,
                                                    const QuadratureScheme& scheme,
                                                    const AdjugateOptions& options) {
  check_e1_alpha(alpha);
  prescreen_positive(b.assembled());
  require_commuting(b, options);
  auto q = integrate_half_line(
      [&](double s) { return checked_resolvent(b, s, options.residual_tol, nullptr); }, -alpha, 1.0, scheme);
  Quadrature<BlockOperator3> out;
  out.value = BlockOperator3::from_assembled(OperatorMatrix(Matrix(std::sin(kPi * alpha) / kPi * q.value)));
  out.nodes = q.nodes;
  out.distances = std::move(q.distances);
  out.converged = q.converged;
  return out;
}

Quadrature<OperatorMatrix> assembled_fracpow_quadrature(const BlockOperator3& b, double alpha,
                                                        const QuadratureScheme& scheme) {
  return balakrishnan_e1(b.assembled(), alpha, scheme);
}

}  // namespace fracop
