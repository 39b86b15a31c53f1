#pragma once

#include <string>
#include <vector>

#include "fracop/block3.hpp"
#include "fracop/quadrature.hpp"

namespace fracop {

enum class Sign { kPositive, kNegative };

struct ClosedFormOptions {
  /// Admit alpha = 1, where each formula extends by continuity to the
  /// inverse (negative sign) or the operator itself (positive sign).
  bool allow_alpha_eq_1 = false;
  /// Absolute commutator bound for Lambda_3; negative selects
  /// 1e-10 * max entry norm.
  double commutation_tol = -1.0;
};

/// Lambda_1^{-+alpha} from powers of A.
BlockOperator3 lambda1_fracpow(const OperatorMatrix& a, double alpha, Sign sign, const ClosedFormOptions& options = {});
BlockOperator3 lambda312_fracpow(const OperatorMatrix& a, double alpha, Sign sign,
                                 const ClosedFormOptions& options = {});
BlockOperator3 lambda4_fracpow(const OperatorMatrix& a, double alpha, Sign sign, const ClosedFormOptions& options = {});
BlockOperator3 lambda3_fracpow(const OperatorMatrix& a1, const OperatorMatrix& a2, const OperatorMatrix& a3,
                               double alpha, Sign sign, const ClosedFormOptions& options = {});

enum class Family { kLambda1, kLambda312, kLambda3, kLambda4 };

std::string to_string(Family family);
/// Accepts "lambda1", "lambda312", "lambda3", "lambda4"; InvalidParams otherwise.
Family parse_family(const std::string& name);

/// Recovers the generating operators when b has the family's layout exactly
/// (Lambda_3 yields A1, A2, A3; the others yield A). InvalidParams otherwise.
std::vector<OperatorMatrix> family_generators(const BlockOperator3& b, Family family);

/// Dispatches to the family's closed form using generators from b.
BlockOperator3 family_fracpow(const BlockOperator3& b, Family family, double alpha, Sign sign,
                              const ClosedFormOptions& options = {});

struct SecondResolvent {
  OperatorMatrix value;   // (A1 - A2)^{-1} [(lam + A2)^{-1} - (lam + A1)^{-1}]
  OperatorMatrix direct;  // (lam + A2)^{-1} (lam + A1)^{-1}
  double discrepancy = 0.0;
};

SecondResolvent second_resolvent_product(const OperatorMatrix& a1, const OperatorMatrix& a2, double lam,
                                         double commutation_tol = -1.0);

struct ResolventProductPower {
  OperatorMatrix value;                   // (A1 - A2)^{-1} [A2^{-alpha} - A1^{-alpha}]
  Quadrature<OperatorMatrix> quadrature;  // sin(pi alpha)/pi * integral s^{-alpha} (s+A2)^{-1} (s+A1)^{-1} ds
  double discrepancy = 0.0;               // relative
};

ResolventProductPower resolvent_product_fracpow(const OperatorMatrix& a1, const OperatorMatrix& a2, double alpha,
                                                const QuadratureScheme& scheme = {});

/// Principal powers exp(alpha Log z); BranchCutViolation for eigenvalues on
/// or within 1e-6 radians of the closed negative real axis.
std::vector<Complex> spectral_map(const std::vector<Complex>& eigs, double alpha);

struct SpectrumPoint {
  Complex base;
  Complex predicted;
  Complex observed;
  double residual = 0.0;
};

struct SpectrumReport {
  std::vector<Complex> base_eigs;
  double alpha = 0.0;
  std::vector<Complex> predicted;
  std::vector<Complex> observed;
  double max_match_residual = 0.0;
  std::vector<SpectrumPoint> points;  // matched rows
};

/// Compares eigenvalues(power) with spectral_map(eigenvalues(B), alpha).
/// alpha is the signed exponent that produced power.
SpectrumReport spectrum_report(const BlockOperator3& b, double alpha, const OperatorMatrix& power);

/// Header plus one row per matched eigenvalue.
std::string spectrum_csv(const SpectrumReport& report);

}  // namespace fracop
