#pragma once

#include <vector>

#include "fracop/operator_matrix.hpp"

namespace fracop {

/// Largest singular value.
double spectral_norm(const Matrix& a);
inline double spectral_norm(const OperatorMatrix& a) { return spectral_norm(a.matrix()); }

/// All n eigenvalues, sorted by (real, imaginary), multiplicities kept.
std::vector<Complex> eigenvalues(const OperatorMatrix& a);

struct ResolventOptions {
  double condition_cap = 1e12;
  double residual_factor = 1e-10;
};

/// (sI + A)^{-1} by a direct dense solve; the residual ||(sI+A)R - I|| is
/// re-verified against residual_factor * max(1, ||A||).
OperatorMatrix resolvent(const OperatorMatrix& a, Complex s, const ResolventOptions& options = {});

/// Which spectra disqualify an operator from being positive.
enum class PrescreenMode {
  /// Reject eigenvalues on the closed negative real axis, i.e. exactly those
  /// that put some s >= 0 into the spectrum of -A.
  kNegativeAxis,
  /// Reject every eigenvalue with non-positive real part.
  kHalfPlane,
};

struct GridSpec {
  int points = 64;  // log-spaced, s = 0 is always included as the first point
  double s_min = 1e-4;
  double s_max_factor = 1e4;  // s_max = factor * max(1, ||A||)
  PrescreenMode prescreen = PrescreenMode::kNegativeAxis;
};

struct PositivityCertificate {
  double m = 1.0;        // max(1, sup_bound)
  double theta_m = 0.0;  // arcsin(1 / (2M))
  double r0 = 0.0;       // 0.99 / (2M)
  std::vector<double> s_grid;
  double sup_bound = 0.0;  // observed sup over s_grid of (1+s)||(s+A)^{-1}||
};

/// Throws NotPositive when the prescreen fails or a grid resolvent is singular.
void prescreen_positive(const OperatorMatrix& a, PrescreenMode mode = PrescreenMode::kNegativeAxis);

PositivityCertificate certify_positive(const OperatorMatrix& a, const GridSpec& grid = {});

std::vector<double> certification_grid(double norm_a, const GridSpec& grid);

}  // namespace fracop
