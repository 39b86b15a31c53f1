#include "fracop/pde_lab.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>

#include "fracop/closed_forms.hpp"
#include "fracop/errors.hpp"
#include "fracop/oracle.hpp"

namespace fracop {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

DirichletLaplacian DirichletLaplacian::make(int n, double length) {
  if (n < 1) fail(ErrorKind::kInvalidParams, "Laplacian needs at least one interior point");
  if (!(length > 0.0) || !std::isfinite(length)) fail(ErrorKind::kInvalidParams, "domain length must be positive");
  const double scale = (n + 1.0) * (n + 1.0) / (length * length);
  RealMatrix m = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = 2.0 * scale;
    if (i + 1 < n) {
      m(i, i + 1) = -scale;
      m(i + 1, i) = -scale;
    }
  }
  DirichletLaplacian lap;
  lap.n = n;
  lap.length = length;
  lap.matrix = OperatorMatrix(m, "L");
  lap.analytic_eigs.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) lap.analytic_eigs.push_back(2.0 * scale * (1.0 - std::cos(k * kPi / (n + 1.0))));
  return lap;
}

Vector DirichletLaplacian::mode(int k) const {
  if (k < 1 || k > n) fail(ErrorKind::kInvalidParams, "mode index out of range");
  Vector v(n);
  for (int j = 1; j <= n; ++j) v(j - 1) = std::sin(k * kPi * j / (n + 1.0));
  return v / v.norm();
}

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::kEdp1: return "EDP1";
    case SystemKind::kOsc16: return "OSC16";
    case SystemKind::kEdp3: return "EDP3";
    case SystemKind::kRd16: return "RD16";
  }
  return "unknown";
}

SystemKind parse_system_kind(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (SystemKind k : {SystemKind::kEdp1, SystemKind::kOsc16, SystemKind::kEdp3, SystemKind::kRd16}) {
    if (to_string(k) == upper) return k;
  }
  fail(ErrorKind::kInvalidParams, "unknown system kind '" + name + "'");
}

namespace {

std::array<OperatorMatrix, 3> edp3_generators(const DirichletLaplacian& lap, const SystemParams& params) {
  if (!params.a) fail(ErrorKind::kInvalidParams, "EDP3 needs coefficients a1, a2, a3");
  const auto& a = *params.a;
  for (double ai : a) {
    if (!(ai > 0.0) || !std::isfinite(ai)) fail(ErrorKind::kInvalidParams, "EDP3 coefficients must be positive");
  }
  if (a[0] == a[1] || a[1] == a[2] || a[0] == a[2]) {
    fail(ErrorKind::kInvalidParams, "EDP3 coefficients must be pairwise distinct");
  }
  const Matrix& l = lap.matrix.matrix();
  return {OperatorMatrix(Matrix(a[0] * l), "A1"), OperatorMatrix(Matrix(a[1] * l), "A2"),
          OperatorMatrix(Matrix(a[2] * l), "A3")};
}

}  // namespace

BlockOperator3 build_system(SystemKind kind, const DirichletLaplacian& lap, const SystemParams& params) {
  switch (kind) {
    case SystemKind::kEdp1: return lambda1(lap.matrix);
    case SystemKind::kOsc16: return lambda312(lap.matrix);
    case SystemKind::kEdp3: {
      const auto g = edp3_generators(lap, params);
      return lambda3(g[0], g[1], g[2]);
    }
    case SystemKind::kRd16: return lambda4(lap.matrix);
  }
  fail(ErrorKind::kInvalidParams, "unknown system kind");
}

OperatorMatrix system_power(SystemKind kind, const DirichletLaplacian& lap, const SystemParams& params, double alpha,
                            bool allow_alpha_eq_1) {
  ClosedFormOptions options;
  options.allow_alpha_eq_1 = allow_alpha_eq_1;
  switch (kind) {
    case SystemKind::kEdp1: return lambda1_fracpow(lap.matrix, alpha, Sign::kPositive, options).assembled();
    case SystemKind::kOsc16: return lambda312_fracpow(lap.matrix, alpha, Sign::kPositive, options).assembled();
    case SystemKind::kEdp3: {
      const auto g = edp3_generators(lap, params);
      return lambda3_fracpow(g[0], g[1], g[2], alpha, Sign::kPositive, options).assembled();
    }
    case SystemKind::kRd16: return lambda4_fracpow(lap.matrix, alpha, Sign::kPositive, options).assembled();
  }
  fail(ErrorKind::kInvalidParams, "unknown system kind");
}

EvolutionResult evolve(const OperatorMatrix& generator, const Vector& u0, const Vector& forcing, double dt, double t_end,
                       EvolutionMethod method) {
  const Eigen::Index n = generator.dim();
  if (u0.size() != n || forcing.size() != n) {
    fail(ErrorKind::kDimensionMismatch, "initial state and forcing must match the generator dimension");
  }
  if (!(dt > 0.0) || !(t_end > 0.0) || !std::isfinite(dt) || !std::isfinite(t_end)) {
    fail(ErrorKind::kInvalidParams, "dt and T must be positive");
  }
  if (dt > t_end) fail(ErrorKind::kInvalidParams, "dt must not exceed T");
  const long steps = std::max(1L, std::lround(t_end / dt));
  const double h = t_end / static_cast<double>(steps);

  EvolutionResult out;
  out.method = method;
  out.times.reserve(static_cast<std::size_t>(steps + 1));
  out.states.reserve(static_cast<std::size_t>(steps + 1));
  out.times.push_back(0.0);
  out.states.push_back(u0);
  const Matrix& lam = generator.matrix();

  if (method == EvolutionMethod::kImplicitEuler) {
    Matrix step = Matrix::Identity(n, n) + h * lam;
    Eigen::PartialPivLU<Matrix> lu(step);
    if (!(lu.rcond() > 16 * std::numeric_limits<double>::epsilon())) {
      fail(ErrorKind::kSingularStep, "I + dt * Lambda is singular");
    }
    Vector u = u0;
    for (long k = 1; k <= steps; ++k) {
      u = lu.solve(Vector(u + h * forcing));
      out.times.push_back(k * t_end / static_cast<double>(steps));
      out.states.push_back(u);
    }
    return out;
  }

  Vector steady = Vector::Zero(n);
  if (forcing.norm() > 0.0) {
    Eigen::PartialPivLU<Matrix> lu(lam);
    if (!(lu.rcond() > 16 * std::numeric_limits<double>::epsilon())) {
      fail(ErrorKind::kOracleFailure, "generator is singular; no steady state for the forcing");
    }
    steady = lu.solve(forcing);
  }
  const Vector offset = u0 - steady;
  try {
    SchurCalculus calculus(lam);
    if (calculus.separation_condition() > 1e12) {
      fail(ErrorKind::kOracleFailure, "Schur blocks too poorly separated for the exact propagator");
    }
    for (long k = 1; k <= steps; ++k) {
      const double t = k * t_end / static_cast<double>(steps);
      const Matrix propagator = calculus.apply(decaying_exponential(t));
      out.times.push_back(t);
      out.states.push_back(propagator * offset + steady);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kOracleFailure) throw;
    fail(ErrorKind::kOracleFailure, e.what());
  }
  return out;
}

EvolutionResult fractional_evolve(SystemKind kind, const DirichletLaplacian& lap, const SystemParams& params,
                                  double alpha, const Vector& u0, double dt, double t_end,
                                  const FractionalOptions& options) {
  const OperatorMatrix generator = system_power(kind, lap, params, alpha, options.allow_alpha_eq_1);
  EvolutionResult out = evolve(generator, u0, Vector::Zero(generator.dim()), dt, t_end, options.method);
  out.alpha = alpha;
  return out;
}

}  // namespace fracop
