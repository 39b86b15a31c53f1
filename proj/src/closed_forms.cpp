#include "fracop/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "fracop/core.hpp"
#include "fracop/errors.hpp"
#include "fracop/oracle.hpp"

namespace fracop {

namespace {

constexpr double kPi = std::numbers::pi;

Matrix zeros(Eigen::Index n) { return Matrix::Zero(n, n); }

void check_alpha(double alpha, const ClosedFormOptions& options) {
  const bool open_range = alpha > 0.0 && alpha < 1.0;
  const bool endpoint = options.allow_alpha_eq_1 && alpha == 1.0;
  if (!open_range && !endpoint) {
    fail(ErrorKind::kInvalidAlpha, "closed forms need 0 < alpha < 1, got " + std::to_string(alpha));
  }
}

double exponent_of(double alpha, Sign sign) { return sign == Sign::kNegative ? -alpha : alpha; }

BlockOperator3 from_blocks(const std::array<std::array<Matrix, 3>, 3>& m, const std::string& label) {
  BlockGrid g;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) g[i][j] = OperatorMatrix(m[i][j], label);
  }
  return assemble(std::move(g));
}

// Inverse of a difference of generators; SingularDifference when it has none.
Matrix difference_inverse(const Matrix& d, const std::string& what) {
  Eigen::PartialPivLU<Matrix> lu(d);
  if (!(lu.rcond() > 1e-12)) fail(ErrorKind::kSingularDifference, what + " is singular");
  return lu.inverse();
}

double max_commutator(const std::vector<const Matrix*>& ms) {
  double worst = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    for (std::size_t j = i + 1; j < ms.size(); ++j) {
      const Matrix& x = *ms[i];
      const Matrix& y = *ms[j];
      worst = std::max(worst, spectral_norm(Matrix(x * y - y * x)));
    }
  }
  return worst;
}

Matrix solve_shifted(const Matrix& a, double s, const Matrix& rhs) {
  Matrix shifted = a;
  shifted.diagonal().array() += s;
  Eigen::PartialPivLU<Matrix> lu(shifted);
  if (!(lu.rcond() > 16 * std::numeric_limits<double>::epsilon())) {
    fail(ErrorKind::kSingularResolvent, "quadrature node hits the spectrum of -A");
  }
  return lu.solve(rhs);
}

bool lex_less(Complex x, Complex y) { return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag()); }

bool close_to(const Matrix& x, const Matrix& y) {
  const double scale = std::max(1.0, spectral_norm(y));
  return spectral_norm(Matrix(x - y)) <= 1e-10 * scale;
}

}  // namespace

BlockOperator3 lambda1_fracpow(const OperatorMatrix& a, double alpha, Sign sign, const ClosedFormOptions& options) {
  check_alpha(alpha, options);
  certify_positive(a);
  const double e = exponent_of(alpha, sign);
  const Eigen::Index n = a.dim();
  const Matrix d = power(a, e);
  const Matrix low = e * power(a, e - 1.0);
  return from_blocks({{{d, zeros(n), zeros(n)}, {zeros(n), d, zeros(n)}, {low, zeros(n), d}}}, "Lambda1^" +
                                                                                                   std::to_string(e));
}

BlockOperator3 lambda312_fracpow(const OperatorMatrix& a, double alpha, Sign sign, const ClosedFormOptions& options) {
  check_alpha(alpha, options);
  certify_positive(a);
  const double e = exponent_of(alpha, sign);
  const Eigen::Index n = a.dim();
  const Matrix half = power(a, e / 2.0);
  const Matrix b11 = (1.0 - e) * half;
  const Matrix b12 = -e * power(a, (e - 1.0) / 2.0);
  const Matrix b21 = e * power(a, (1.0 + e) / 2.0);
  const Matrix b22 = (1.0 + e) * half;
  const Matrix b33 = std::pow(2.0, e) * half;
  return from_blocks({{{b11, b12, zeros(n)}, {b21, b22, zeros(n)}, {zeros(n), zeros(n), b33}}},
                     "Lambda312^" + std::to_string(e));
}

BlockOperator3 lambda4_fracpow(const OperatorMatrix& a, double alpha, Sign sign, const ClosedFormOptions& options) {
  check_alpha(alpha, options);
  certify_positive(a);
  const double e = exponent_of(alpha, sign);
  const Eigen::Index n = a.dim();
  const double c = std::cos(kPi * e / 2.0);
  const double sn = std::sin(kPi * e / 2.0);
  const Matrix half = power(a, e / 2.0);
  const Matrix b13 = -sn * power(a, (e - 1.0) / 2.0);
  const Matrix b31 = sn * power(a, (1.0 + e) / 2.0);
  return from_blocks({{{Matrix(c * half), zeros(n), b13}, {zeros(n), power(a, e), zeros(n)},
                       {b31, zeros(n), Matrix(c * half)}}},
                     "Lambda4^" + std::to_string(e));
}

BlockOperator3 lambda3_fracpow(const OperatorMatrix& a1, const OperatorMatrix& a2, const OperatorMatrix& a3,
                               double alpha, Sign sign, const ClosedFormOptions& options) {
  check_alpha(alpha, options);
  const Eigen::Index n = a1.dim();
  if (a2.dim() != n || a3.dim() != n) fail(ErrorKind::kDimensionMismatch, "A1, A2, A3 must share one dimension");
  certify_positive(a1);
  certify_positive(a2);
  certify_positive(a3);

  const double max_norm = std::max({spectral_norm(a1), spectral_norm(a2), spectral_norm(a3)});
  const double tol = options.commutation_tol >= 0.0 ? options.commutation_tol : 1e-10 * max_norm;
  const double comm = max_commutator({&a1.matrix(), &a2.matrix(), &a3.matrix()});
  if (comm > tol) fail(ErrorKind::kNonCommuting, "A1, A2, A3 commutator norm " + std::to_string(comm));

  difference_inverse(a1.matrix() - a2.matrix(), "A1 - A2");
  difference_inverse(a2.matrix() - a3.matrix(), "A2 - A3");
  const Matrix d13 = difference_inverse(a1.matrix() - a3.matrix(), "A1 - A3");

  const double e = exponent_of(alpha, sign);
  const Matrix p1 = power(a1, e);
  const Matrix p2 = power(a2, e);
  const Matrix p3 = power(a3, e);
  const Matrix low = d13 * (p1 - p3);
  return from_blocks({{{p1, zeros(n), zeros(n)}, {zeros(n), p2, zeros(n)}, {low, zeros(n), p3}}},
                     "Lambda3^" + std::to_string(e));
}

std::string to_string(Family family) {
  switch (family) {
    case Family::kLambda1: return "lambda1";
    case Family::kLambda312: return "lambda312";
    case Family::kLambda3: return "lambda3";
    case Family::kLambda4: return "lambda4";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  for (Family f : {Family::kLambda1, Family::kLambda312, Family::kLambda3, Family::kLambda4}) {
    if (to_string(f) == name) return f;
  }
  fail(ErrorKind::kInvalidParams, "unknown block family '" + name + "'");
}

std::vector<OperatorMatrix> family_generators(const BlockOperator3& b, Family family) {
  std::vector<OperatorMatrix> gens;
  BlockOperator3 rebuilt;
  switch (family) {
    case Family::kLambda1:
      gens = {b.entry(0, 0)};
      rebuilt = lambda1(gens[0]);
      break;
    case Family::kLambda312:
      gens = {b.entry(1, 0)};
      prescreen_positive(gens[0]);
      rebuilt = lambda312(gens[0]);
      break;
    case Family::kLambda3:
      gens = {b.entry(0, 0), b.entry(1, 1), b.entry(2, 2)};
      rebuilt = lambda3(gens[0], gens[1], gens[2]);
      break;
    case Family::kLambda4:
      gens = {b.entry(1, 1)};
      rebuilt = lambda4(gens[0]);
      break;
  }
  if (!close_to(b.assembled().matrix(), rebuilt.assembled().matrix())) {
    fail(ErrorKind::kInvalidParams, "block operator does not have the " + to_string(family) + " layout");
  }
  return gens;
}

BlockOperator3 family_fracpow(const BlockOperator3& b, Family family, double alpha, Sign sign,
                              const ClosedFormOptions& options) {
  const auto gens = family_generators(b, family);
  switch (family) {
    case Family::kLambda1: return lambda1_fracpow(gens[0], alpha, sign, options);
    case Family::kLambda312: return lambda312_fracpow(gens[0], alpha, sign, options);
    case Family::kLambda3: return lambda3_fracpow(gens[0], gens[1], gens[2], alpha, sign, options);
    case Family::kLambda4: return lambda4_fracpow(gens[0], alpha, sign, options);
  }
  fail(ErrorKind::kInvalidParams, "unknown block family");
}

SecondResolvent second_resolvent_product(const OperatorMatrix& a1, const OperatorMatrix& a2, double lam,
                                         double commutation_tol) {
  if (a1.dim() != a2.dim()) fail(ErrorKind::kDimensionMismatch, "A1 and A2 differ in dimension");
  const Matrix diff = a1.matrix() - a2.matrix();
  const Matrix diff_inv = difference_inverse(diff, "A1 - A2");
  const Matrix r1 = resolvent(a1, lam).matrix();
  const Matrix r2 = resolvent(a2, lam).matrix();

  const double comm = spectral_norm(Matrix(diff * r2 - r2 * diff));
  const double tol = commutation_tol >= 0.0 ? commutation_tol : 1e-10 * spectral_norm(diff) * spectral_norm(r2);
  if (comm > tol) fail(ErrorKind::kNonCommuting, "A1 - A2 does not commute with (lam + A2)^{-1}");

  SecondResolvent out;
  out.value = OperatorMatrix(Matrix(diff_inv * (r2 - r1)), "resolvent difference");
  out.direct = OperatorMatrix(Matrix(r2 * r1), "resolvent product");
  out.discrepancy = spectral_norm(Matrix(out.value.matrix() - out.direct.matrix()));
  return out;
}

ResolventProductPower resolvent_product_fracpow(const OperatorMatrix& a1, const OperatorMatrix& a2, double alpha,
                                                const QuadratureScheme& scheme) {
  check_e1_alpha(alpha);
  if (a1.dim() != a2.dim()) fail(ErrorKind::kDimensionMismatch, "A1 and A2 differ in dimension");
  const Matrix diff_inv = difference_inverse(a1.matrix() - a2.matrix(), "A1 - A2");
  prescreen_positive(a1);
  prescreen_positive(a2);

  ResolventProductPower out;
  out.value = OperatorMatrix(Matrix(diff_inv * (power(a2, -alpha) - power(a1, -alpha))), "product power");

  const Matrix& m1 = a1.matrix();
  const Matrix& m2 = a2.matrix();
  const Matrix eye = Matrix::Identity(a1.dim(), a1.dim());
  auto q = integrate_half_line([&](double s) { return solve_shifted(m2, s, solve_shifted(m1, s, eye)); }, -alpha,
                               2.0, scheme);
  out.quadrature.value = OperatorMatrix(Matrix(std::sin(kPi * alpha) / kPi * q.value), "product quadrature");
  out.quadrature.nodes = q.nodes;
  out.quadrature.distances = std::move(q.distances);
  out.quadrature.converged = q.converged;
  out.discrepancy = relative_error(out.quadrature.value, out.value);
  return out;
}

std::vector<Complex> spectral_map(const std::vector<Complex>& eigs, double alpha) {
  std::vector<Complex> out;
  out.reserve(eigs.size());
  for (const Complex& z : eigs) {
    if (std::abs(z) < 1e-12 || std::abs(std::arg(z)) > kPi - 1e-6) {
      fail(ErrorKind::kBranchCutViolation, "eigenvalue (" + std::to_string(z.real()) + ", " +
                                               std::to_string(z.imag()) + ") lies on the branch cut");
    }
    out.push_back(alpha == 1.0 ? z : std::exp(alpha * std::log(z)));
  }
  return out;
}

SpectrumReport spectrum_report(const BlockOperator3& b, double alpha, const OperatorMatrix& power_op) {
  if (power_op.dim() != b.assembled().dim()) {
    fail(ErrorKind::kDimensionMismatch, "power and block operator differ in dimension");
  }
  SpectrumReport report;
  report.alpha = alpha;
  report.base_eigs = eigenvalues(b.assembled());
  report.predicted = spectral_map(report.base_eigs, alpha);
  report.observed = eigenvalues(power_op);

  std::vector<std::size_t> order(report.predicted.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return lex_less(report.predicted[i], report.predicted[j]); });

  std::vector<Complex> observed = report.observed;
  std::sort(observed.begin(), observed.end(), lex_less);
  std::vector<bool> used(observed.size(), false);
  for (std::size_t idx : order) {
    const Complex target = report.predicted[idx];
    std::size_t best = observed.size();
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < observed.size(); ++k) {
      if (used[k]) continue;
      const double d = std::abs(observed[k] - target);
      if (d < best_distance) {
        best_distance = d;
        best = k;
      }
    }
    used[best] = true;
    report.points.push_back({report.base_eigs[idx], target, observed[best], best_distance});
    report.max_match_residual = std::max(report.max_match_residual, best_distance);
  }
  return report;
}

std::string spectrum_csv(const SpectrumReport& report) {
  std::string out = "re_base,im_base,re_pred,im_pred,re_obs,im_obs,residual\n";
  char line[256];
  for (const auto& p : report.points) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.base.real(), p.base.imag(),
                  p.predicted.real(), p.predicted.imag(), p.observed.real(), p.observed.imag(), p.residual);
    out += line;
  }
  return out;
}

}  // namespace fracop
