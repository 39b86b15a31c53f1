#include "fracop/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "fracop/core.hpp"
#include "fracop/errors.hpp"
#include "fracop/oracle.hpp"

namespace fracop {

namespace {

constexpr double kPi = std::numbers::pi;

// Binary-counter pairwise summation: the association order depends only on
// the number of terms, never on scheduling.
class PairwiseSum {
 public:
  void add(Matrix term) {
    int level = 0;
    while (!stack_.empty() && stack_.back().second == level) {
      term = stack_.back().first + term;
      stack_.pop_back();
      ++level;
    }
    stack_.emplace_back(std::move(term), level);
  }

  Matrix total(Eigen::Index rows, Eigen::Index cols) const {
    Matrix sum = Matrix::Zero(rows, cols);
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) sum = it->first + sum;
    return sum;
  }

 private:
  std::vector<std::pair<Matrix, int>> stack_;
};

GaussRule build_jacobi_rule(double exponent, int count) {
  // Jacobi weight (1-t)^0 (1+t)^b on [-1, 1], mapped to x = (1+t)/2.
  const double a = 0.0;
  const double b = exponent;
  Eigen::VectorXd diag(count);
  Eigen::VectorXd sub(std::max(count - 1, 0));
  for (int k = 0; k < count; ++k) {
    if (k == 0) {
      diag(k) = (b - a) / (a + b + 2.0);
    } else {
      const double s = 2.0 * k + a + b;
      diag(k) = (b * b - a * a) / (s * (s + 2.0));
    }
  }
  for (int k = 1; k < count; ++k) {
    double beta;
    if (k == 1) {
      beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
    } else {
      const double s = 2.0 * k + a + b;
      beta = 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0));
    }
    sub(k - 1) = std::sqrt(beta);
  }

  Eigen::VectorXd nodes_t;
  if (count == 1) {
    nodes_t = diag;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) fail(ErrorKind::kEigenFailure, "Jacobi matrix eigenvalues did not converge");
    nodes_t = solver.eigenvalues();
  }

  // mu0 = integral_{-1}^{1} (1+t)^b dt
  const double mu0 = std::pow(2.0, b + 1.0) / (b + 1.0);
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(count));
  rule.weights.resize(static_cast<std::size_t>(count));
  const double to_unit = std::pow(2.0, -(b + 1.0));
  for (int i = 0; i < count; ++i) {
    const double t = nodes_t(i);
    double p_prev = 0.0;
    double p = 1.0 / std::sqrt(mu0);
    double christoffel = p * p;
    for (int k = 0; k + 1 < count; ++k) {
      const double p_next = ((t - diag(k)) * p - (k > 0 ? sub(k - 1) * p_prev : 0.0)) / sub(k);
      p_prev = p;
      p = p_next;
      christoffel += p * p;
    }
    rule.nodes[i] = 0.5 * (1.0 + t);
    rule.weights[i] = to_unit / christoffel;
  }
  return rule;
}

Matrix shifted_resolvent_power(const Matrix& a, Complex shift, int p, const Matrix& rhs) {
  Matrix shifted = a;
  shifted.diagonal().array() += shift;
  Eigen::PartialPivLU<Matrix> lu(shifted);
  if (!(lu.rcond() > 16 * std::numeric_limits<double>::epsilon())) {
    fail(ErrorKind::kSingularResolvent, "quadrature node hits the spectrum of -A");
  }
  Matrix x = lu.solve(rhs);
  for (int k = 1; k < p; ++k) x = lu.solve(x);
  return x;
}

Matrix identity_like(const OperatorMatrix& a) { return Matrix::Identity(a.dim(), a.dim()); }

template <typename Value>
Quadrature<Value> rewrap(Quadrature<Matrix>&& q, Value value) {
  Quadrature<Value> out;
  out.value = std::move(value);
  out.nodes = q.nodes;
  out.distances = std::move(q.distances);
  out.converged = q.converged;
  return out;
}

Quadrature<OperatorMatrix> as_operator(Quadrature<Matrix>&& q, double factor, const std::string& label) {
  Matrix scaled = factor * q.value;
  return rewrap(std::move(q), OperatorMatrix(std::move(scaled), label));
}

}  // namespace

void QuadratureScheme::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) fail(ErrorKind::kInvalidParams, "rel_tol must lie in (0, 1)");
  if (max_doublings < 1) fail(ErrorKind::kInvalidParams, "max_doublings must be >= 1");
  if (!(split_point > 0.0)) fail(ErrorKind::kInvalidParams, "split_point must be positive");
  if (base_nodes < 8) fail(ErrorKind::kInvalidParams, "base_nodes must be >= 8");
}

const GaussRule& jacobi_rule(double exponent, int count) {
  if (!(exponent > -1.0)) fail(ErrorKind::kDivergentIntegral, "Gauss-Jacobi weight exponent must exceed -1");
  if (count < 1) fail(ErrorKind::kInvalidParams, "Gauss rule needs at least one node");
  static std::mutex mutex;
  static std::map<std::pair<double, int>, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{exponent, count}];
  if (!slot) slot = std::make_unique<GaussRule>(build_jacobi_rule(exponent, count));
  return *slot;
}

Quadrature<Matrix> integrate_half_line(const MatrixIntegrand& integrand, double weight_exponent,
                                       double decay_order, const QuadratureScheme& scheme) {
  scheme.validate();
  const double head_exponent = weight_exponent;
  const double tail_exponent = decay_order - weight_exponent - 2.0;
  if (!(head_exponent > -1.0)) {
    fail(ErrorKind::kDivergentIntegral, "integrand is not integrable at the origin (weight exponent " +
                                            std::to_string(weight_exponent) + ")");
  }
  if (!(tail_exponent > -1.0)) {
    fail(ErrorKind::kDivergentIntegral, "integrand is not integrable at infinity (exponent " +
                                            std::to_string(weight_exponent - decay_order) + ")");
  }

  const double c = scheme.split_point;
  const double scale = std::pow(c, weight_exponent + 1.0);

  Quadrature<Matrix> result;
  Matrix previous;
  Matrix before_previous;
  for (int level = 0; level <= scheme.max_doublings; ++level) {
    const int count = scheme.base_nodes << level;
    const GaussRule& head = jacobi_rule(head_exponent, count);
    const GaussRule& tail = jacobi_rule(tail_exponent, count);

    PairwiseSum sum;
    Eigen::Index rows = 0, cols = 0;
    for (int i = 0; i < count; ++i) {
      Matrix f = integrand(c * head.nodes[i]);
      rows = f.rows();
      cols = f.cols();
      sum.add(head.weights[i] * f);
    }
    for (int i = 0; i < count; ++i) {
      const double u = tail.nodes[i];
      sum.add((tail.weights[i] * std::pow(u, -decay_order)) * integrand(c / u));
    }
    Matrix current = scale * sum.total(rows, cols);
    if (!current.allFinite()) fail(ErrorKind::kNotConverged, "quadrature produced non-finite values");

    result.nodes = 2 * count;
    if (level > 0) {
      const double denom = std::max(spectral_norm(current), std::numeric_limits<double>::min());
      const double distance = spectral_norm(Matrix(current - previous)) / denom;
      result.distances.push_back(distance);
      if (distance <= scheme.rel_tol) {
        result.value = std::move(current);
        result.converged = true;
        return result;
      }
    }
    before_previous = std::move(previous);
    previous = std::move(current);
    if (level == scheme.max_doublings) {
      if (scheme.throw_on_nonconvergence) {
        throw NotConvergedError("node doubling exhausted after " + std::to_string(result.nodes) + " nodes",
                                before_previous, previous, result.distances.back());
      }
      result.value = std::move(previous);
      return result;
    }
  }
  return result;
}

void check_e1_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorKind::kInvalidAlpha, "E1 requires 0 < alpha < 1, got " + std::to_string(alpha));
  }
  if (alpha < 1e-3 || alpha > 1.0 - 1e-3) {
    fail(ErrorKind::kInvalidAlpha, "alpha within 1e-3 of {0, 1}; use E2 with m >= 1");
  }
}

Quadrature<OperatorMatrix> balakrishnan_e1(const OperatorMatrix& a, double alpha, const QuadratureScheme& scheme) {
  check_e1_alpha(alpha);
  prescreen_positive(a);
  const Matrix& am = a.matrix();
  const Matrix eye = identity_like(a);
  auto q = integrate_half_line([&](double s) { return shifted_resolvent_power(am, s, 1, eye); }, -alpha, 1.0,
                               scheme);
  return as_operator(std::move(q), std::sin(kPi * alpha) / kPi, a.label() + "^-" + std::to_string(alpha));
}

Quadrature<OperatorMatrix> balakrishnan_e2(const OperatorMatrix& a, double alpha, int m,
                                           const QuadratureScheme& scheme) {
  if (m < 1) fail(ErrorKind::kInvalidParams, "E2 requires m >= 1");
  if (!(alpha > 0.0 && alpha < m + 1.0)) {
    fail(ErrorKind::kInvalidAlpha, "E2 requires 0 < alpha < m+1, got " + std::to_string(alpha));
  }
  if (alpha < 1e-3 || alpha > m + 1.0 - 1e-3) {
    fail(ErrorKind::kInvalidAlpha, "alpha within 1e-3 of the ends of (0, m+1)");
  }
  const double nearest = std::round(alpha);
  if (std::abs(alpha - nearest) < 1e-9) fail(ErrorKind::kInvalidAlpha, "E2 requires non-integer alpha");

  // sin(pi alpha)/pi * m! / prod_{j=1..m} (j - alpha), with the factor
  // sin(pi alpha)/(k - alpha) for the nearest integer k evaluated without
  // cancellation.
  const int k = static_cast<int>(nearest);
  double coeff = 1.0 / kPi;
  bool paired = false;
  if (k >= 1 && k <= m) {
    const double delta = alpha - k;
    const double sign = (k % 2 == 0) ? -1.0 : 1.0;
    coeff *= sign * std::sin(kPi * delta) / delta;
    paired = true;
  } else {
    coeff *= std::sin(kPi * alpha);
  }
  for (int j = 1; j <= m; ++j) {
    coeff *= j;
    if (!(paired && j == k)) coeff /= (j - alpha);
  }

  prescreen_positive(a);
  const Matrix& am = a.matrix();
  const Matrix eye = identity_like(a);
  auto q = integrate_half_line([&](double s) { return shifted_resolvent_power(am, s, m + 1, eye); }, m - alpha,
                               m + 1.0, scheme);
  return as_operator(std::move(q), coeff, a.label() + "^-" + std::to_string(alpha));
}

Quadrature<Vector> balakrishnan_e3_apply(const OperatorMatrix& a, double alpha, const Vector& x,
                                         const QuadratureScheme& scheme) {
  if (!(alpha > -1.0 && alpha < 1.0) || alpha == 0.0) {
    fail(ErrorKind::kInvalidAlpha, "E3 requires -1 < alpha < 1, alpha != 0, got " + std::to_string(alpha));
  }
  if (std::abs(alpha) > 1.0 - 1e-3) fail(ErrorKind::kInvalidAlpha, "|alpha| within 1e-3 of 1");
  if (x.size() != a.dim()) fail(ErrorKind::kDimensionMismatch, "vector length differs from operator dimension");
  prescreen_positive(a);
  const Matrix& am = a.matrix();
  const Matrix ax = am * x;
  auto q = integrate_half_line([&](double s) { return shifted_resolvent_power(am, s, 2, ax); }, -alpha, 2.0, scheme);
  const double coeff = std::sin(kPi * alpha) / (kPi * alpha);
  Vector value = coeff * q.value.col(0);
  return rewrap(std::move(q), std::move(value));
}

Quadrature<OperatorMatrix> weighted_resolvent_integral(const OperatorMatrix& a, double exponent, int p,
                                                       const QuadratureScheme& scheme) {
  if (p < 1) fail(ErrorKind::kInvalidParams, "resolvent power p must be >= 1");
  if (!(exponent > -1.0) || !(exponent - p < -1.0)) {
    fail(ErrorKind::kDivergentIntegral, "integral of s^" + std::to_string(exponent) + " (s+A)^-" + std::to_string(p) +
                                            " diverges");
  }
  prescreen_positive(a);
  const Matrix& am = a.matrix();
  const Matrix eye = identity_like(a);
  auto q = integrate_half_line([&](double s) { return shifted_resolvent_power(am, s, p, eye); }, exponent,
                               static_cast<double>(p), scheme);
  return as_operator(std::move(q), 1.0, "W(" + a.label() + ")");
}

ChangeOfVariables change_of_variables_integral(const OperatorMatrix& a, double gamma, double omega, double theta,
                                               const QuadratureScheme& scheme) {
  if (!(omega > 0.0) || !(theta > 0.0)) fail(ErrorKind::kInvalidParams, "omega and theta must be positive");
  if (!(gamma > 1.0 - theta && gamma < 1.0)) {
    fail(ErrorKind::kInvalidParams, "change of variables requires 1 - theta < gamma < 1");
  }
  prescreen_positive(a);
  const Matrix& am = a.matrix();
  const Matrix eye = identity_like(a);
  auto q = integrate_half_line(
      [&](double s) { return shifted_resolvent_power(am, omega * std::pow(s, theta), 1, eye); }, -gamma, theta,
      scheme);

  ChangeOfVariables out;
  out.beta = 1.0 + (gamma - 1.0) / theta;
  const double factor =
      (1.0 / theta) * std::pow(1.0 / omega, (1.0 - gamma) / theta) * kPi / std::sin(kPi * out.beta);
  out.predicted = OperatorMatrix(Matrix(factor * power(a, -out.beta)), "predicted");
  out.integral = as_operator(std::move(q), 1.0, "H(" + a.label() + ")");
  return out;
}

}  // namespace fracop
