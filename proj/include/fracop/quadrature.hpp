#pragma once

#include <functional>
#include <vector>

#include "fracop/operator_matrix.hpp"

namespace fracop {

struct QuadratureScheme {
  double rel_tol = 1e-8;
  int max_doublings = 8;
  double split_point = 1.0;
  int base_nodes = 32;
  /// When false, a run that exhausts max_doublings returns with
  /// converged == false instead of throwing NotConverged.
  bool throw_on_nonconvergence = true;

  void validate() const;
};

/// Gauss rule for integral_0^1 x^exponent f(x) dx (exponent > -1).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Jacobi nodes from the eigenvalues of the Jacobi matrix, weights from
/// the Christoffel sums. Rules are memoized; the returned reference stays valid
/// for the life of the process.
const GaussRule& jacobi_rule(double exponent, int count);

template <typename Value>
struct Quadrature {
  Value value;
  int nodes = 0;  // integrand evaluations in the accepted level
  std::vector<double> distances;  // ||I_k - I_{k-1}|| / ||I_k|| per doubling
  bool converged = false;
};

using MatrixIntegrand = std::function<Matrix(double s)>;

/// integral_0^inf s^weight_exponent F(s) ds for F analytic on [0, inf) with
/// ||F(s)|| = O(s^-decay_order) at infinity. The half-line is split at
/// scheme.split_point; the tail is mapped by s = split / u and both pieces use
/// Gauss-Jacobi rules that absorb the endpoint powers. Node counts double
/// until the spectral-norm change falls to rel_tol.
Quadrature<Matrix> integrate_half_line(const MatrixIntegrand& integrand, double weight_exponent,
                                       double decay_order, const QuadratureScheme& scheme);

/// A^{-alpha} = sin(pi alpha)/pi * integral s^{-alpha} (s+A)^{-1} ds, 0 < alpha < 1.
Quadrature<OperatorMatrix> balakrishnan_e1(const OperatorMatrix& a, double alpha,
                                           const QuadratureScheme& scheme = {});

/// A^{-alpha} through (s+A)^{-m-1}, 0 < alpha < m+1, alpha not an integer.
Quadrature<OperatorMatrix> balakrishnan_e2(const OperatorMatrix& a, double alpha, int m,
                                           const QuadratureScheme& scheme = {});

/// A^{-alpha} x = sin(pi alpha)/(pi alpha) * integral s^{-alpha} (s+A)^{-2} A x ds, -1 < alpha < 1.
/// The weight must be s^{-alpha}: with s^{+alpha} the integral evaluates to A^{+alpha} x.
Quadrature<Vector> balakrishnan_e3_apply(const OperatorMatrix& a, double alpha, const Vector& x,
                                         const QuadratureScheme& scheme = {});

/// integral_0^inf s^exponent (s+A)^{-p} ds; DivergentIntegral unless
/// exponent > -1 and exponent - p < -1.
Quadrature<OperatorMatrix> weighted_resolvent_integral(const OperatorMatrix& a, double exponent, int p,
                                                       const QuadratureScheme& scheme = {});

struct ChangeOfVariables {
  Quadrature<OperatorMatrix> integral;  // direct quadrature, no substitution
  OperatorMatrix predicted;             // (1/theta) omega^{-(1-gamma)/theta} pi/sin(pi beta) A^{-beta}
  double beta = 0.0;                    // 1 + (gamma - 1)/theta
};

/// integral_0^inf s^{-gamma} (omega s^theta + A)^{-1} ds, with
/// omega > 0, theta > 0, 1 - theta < gamma < 1.
ChangeOfVariables change_of_variables_integral(const OperatorMatrix& a, double gamma, double omega, double theta,
                                               const QuadratureScheme& scheme = {});

/// Validates the E1 exponent range, including the 1e-3 exclusion zone at the
/// ends where the prefactor and the integral cancel.
void check_e1_alpha(double alpha);

}  // namespace fracop
