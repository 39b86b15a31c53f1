#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fracop/block3.hpp"

namespace fracop {

/// -d^2/dx^2 on (0, length) with zero boundary values, n interior points.
struct DirichletLaplacian {
  int n = 0;
  double length = 1.0;
  OperatorMatrix matrix;
  std::vector<double> analytic_eigs;  // increasing

  static DirichletLaplacian make(int n, double length = 1.0);

  /// sin(k pi x_j / length) normalized to unit Euclidean length, k = 1 .. n.
  Vector mode(int k) const;
};

enum class SystemKind {
  kEdp1,   // Lambda_1 over the Laplacian
  kOsc16,  // Lambda_(3,1/2) over the Laplacian
  kEdp3,   // Lambda_3 with A_i = a_i L
  kRd16,   // Lambda_4 over the Laplacian
};

std::string to_string(SystemKind kind);
/// Accepts "EDP1", "OSC16", "EDP3", "RD16" (any case).
SystemKind parse_system_kind(const std::string& name);

struct SystemParams {
  std::optional<std::array<double, 3>> a;  // EDP3 only
};

BlockOperator3 build_system(SystemKind kind, const DirichletLaplacian& lap, const SystemParams& params = {});

enum class EvolutionMethod { kImplicitEuler, kEigenExact };

struct EvolutionResult {
  std::vector<double> times;
  std::vector<Vector> states;
  EvolutionMethod method = EvolutionMethod::kImplicitEuler;
  double alpha = 1.0;
};

/// U' + Lambda U = F on [0, T] with K = round(T/dt) uniform steps.
EvolutionResult evolve(const OperatorMatrix& generator, const Vector& u0, const Vector& forcing, double dt, double t_end,
                       EvolutionMethod method);
inline EvolutionResult evolve(const BlockOperator3& b, const Vector& u0, const Vector& forcing, double dt, double t_end,
                              EvolutionMethod method) {
  return evolve(b.assembled(), u0, forcing, dt, t_end, method);
}

struct FractionalOptions {
  bool allow_alpha_eq_1 = false;
  EvolutionMethod method = EvolutionMethod::kImplicitEuler;
};

/// U' + Lambda^alpha U = 0 with Lambda^alpha from the family's closed form.
EvolutionResult fractional_evolve(SystemKind kind, const DirichletLaplacian& lap, const SystemParams& params,
                                  double alpha, const Vector& u0, double dt, double t_end,
                                  const FractionalOptions& options = {});

/// Lambda^alpha for the system's family (positive power).
OperatorMatrix system_power(SystemKind kind, const DirichletLaplacian& lap, const SystemParams& params, double alpha,
                            bool allow_alpha_eq_1 = false);

}  // namespace fracop
