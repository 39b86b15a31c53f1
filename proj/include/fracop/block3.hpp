#pragma once

#include <array>
#include <utility>

#include "fracop/operator_matrix.hpp"
#include "fracop/quadrature.hpp"

namespace fracop {

using BlockGrid = std::array<std::array<OperatorMatrix, 3>, 3>;

/// A 3x3 grid of n x n operators together with its 3n x 3n assembled form.
class BlockOperator3 {
 public:
  BlockOperator3() = default;

  /// Throws DimensionMismatch unless all nine entries share one dimension.
  static BlockOperator3 assemble(BlockGrid entries);
  /// Splits a 3n x 3n matrix into its nine n x n blocks.
  static BlockOperator3 from_assembled(const OperatorMatrix& assembled);

  Eigen::Index n() const noexcept { return n_; }
  const OperatorMatrix& entry(int i, int j) const { return entries_.at(i).at(j); }
  const BlockGrid& entries() const noexcept { return entries_; }
  const OperatorMatrix& assembled() const noexcept { return assembled_; }

 private:
  Eigen::Index n_ = 0;
  BlockGrid entries_;
  OperatorMatrix assembled_;
};

inline BlockOperator3 assemble(BlockGrid entries) { return BlockOperator3::assemble(std::move(entries)); }

// The four block layouts studied here.
BlockOperator3 lambda1(const OperatorMatrix& a);    // [[A,0,0],[0,A,0],[I,0,A]]
BlockOperator3 lambda312(const OperatorMatrix& a);  // [[0,-I,0],[A,2A^{1/2},0],[0,0,2A^{1/2}]]
BlockOperator3 lambda3(const OperatorMatrix& a1, const OperatorMatrix& a2, const OperatorMatrix& a3);
BlockOperator3 lambda4(const OperatorMatrix& a);    // [[0,0,-I],[0,A,0],[A,0,0]]

struct CommutationReport {
  double max_commutator_norm = 0.0;
  std::pair<std::pair<int, int>, std::pair<int, int>> worst_pair{{0, 0}, {0, 0}};
};

CommutationReport commutation_report(const BlockOperator3& b);

struct AdjugateOptions {
  /// Absolute bound on entry commutators; negative selects 1e-10 * max entry norm.
  double commutation_tol = -1.0;
  double residual_tol = 1e-8;
};

/// Default commutation tolerance for b when options leave it unset.
double effective_commutation_tol(const BlockOperator3& b, const AdjugateOptions& options);

struct AdjugateResolvent {
  BlockOperator3 value;
  double residual = 0.0;  // ||(sI + Lambda) R - I||
};

/// (sI + Lambda)^{-1} through the cofactor expansion divided by the operator
/// determinant. Valid only when the entries commute; the residual is checked
/// and a failing result raises AdjugateFormulaFailed.
AdjugateResolvent adjugate_resolvent(const BlockOperator3& b, double s, const AdjugateOptions& options = {});

/// sin(pi alpha)/pi * integral s^{-alpha} R_ij(s) ds entry by entry, with R
/// the adjugate resolvent.
Quadrature<BlockOperator3> block_fracpow_quadrature(const BlockOperator3& b, double alpha,
                                                    const QuadratureScheme& scheme = {},
                                                    const AdjugateOptions& options = {});

/// E1 applied directly to the assembled 3n x 3n matrix.
Quadrature<OperatorMatrix> assembled_fracpow_quadrature(const BlockOperator3& b, double alpha,
                                                        const QuadratureScheme& scheme = {});

}  // namespace fracop
