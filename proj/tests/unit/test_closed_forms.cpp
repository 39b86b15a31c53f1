#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fracop/closed_forms.hpp"
#include "fracop/core.hpp"
#include "fracop/oracle.hpp"
#include "fracop/pde_lab.hpp"
#include "support/check.hpp"
#include "support/reference.hpp"

using fracop::BlockOperator3;
using fracop::Complex;
using fracop::ErrorKind;
using fracop::Family;
using fracop::Matrix;
using fracop::OperatorMatrix;
using fracop::RealMatrix;
using fracop::Sign;

namespace {

OperatorMatrix scalar(double a) { return OperatorMatrix(RealMatrix(RealMatrix::Constant(1, 1, a))); }

OperatorMatrix scaled(const OperatorMatrix& a, double c) { return OperatorMatrix(Matrix(c * a.matrix())); }

Matrix real3(std::initializer_list<double> v) {
  RealMatrix m(3, 3);
  auto it = v.begin();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = *it++;
  return m.cast<Complex>();
}

fracop::ClosedFormOptions extended() {
  fracop::ClosedFormOptions o;
  o.allow_alpha_eq_1 = true;
  return o;
}

struct Case {
  Family family;
  BlockOperator3 block;
};

std::vector<Case> cases(const OperatorMatrix& l) {
  return {{Family::kLambda1, fracop::lambda1(l)},
          {Family::kLambda312, fracop::lambda312(l)},
          {Family::kLambda3, fracop::lambda3(l, scaled(l, 2.0), scaled(l, 3.0))},
          {Family::kLambda4, fracop::lambda4(l)}};
}

Matrix closed(const Case& c, double alpha, Sign sign, const fracop::ClosedFormOptions& o = {}) {
  return fracop::family_fracpow(c.block, c.family, alpha, sign, o).assembled().matrix();
}

}  // namespace

TEST_SUITE("closed_forms") {
  TEST_CASE("lambda1 examples") {
    const Matrix m = fracop::lambda1_fracpow(scalar(2.0), 0.5, Sign::kNegative).assembled().matrix();
    CHECK(ref::rel(m, ref::eigen_power(fracop::lambda1(scalar(2.0)).assembled().matrix(), -0.5)) <= 1e-12);
    CHECK(m(2, 0).real() == doctest::Approx(-0.176777).epsilon(1e-5));

    const auto at_identity = fracop::lambda1_fracpow(OperatorMatrix::identity(3), 0.3, Sign::kNegative);
    CHECK(ref::rel(at_identity.entry(2, 0).matrix(), Matrix(-0.3 * Matrix::Identity(3, 3))) <= 1e-14);

    const Matrix one = fracop::lambda1_fracpow(scalar(2.0), 1.0, Sign::kNegative, extended()).assembled().matrix();
    CHECK(ref::rel(one, real3({0.5, 0, 0, 0, 0.5, 0, -0.25, 0, 0.5})) <= 1e-14);
  }

  TEST_CASE("lambda312 examples") {
    const auto l = fracop::lambda312(scalar(4.0));
    const Matrix m = fracop::lambda312_fracpow(scalar(4.0), 0.5, Sign::kNegative).assembled().matrix();
    CHECK(ref::rel(m, ref::eigen_power(l.assembled().matrix(), -0.5)) <= 1e-10);
    CHECK(ref::rel(m, real3({1.06066, 0.176777, 0, -0.707107, 0.353553, 0, 0, 0, 0.5})) <= 1e-5);

    // the inverse of [[0,-1,0],[4,4,0],[0,0,4]] has (3,3) entry 1/4
    const Matrix one = fracop::lambda312_fracpow(scalar(4.0), 1.0, Sign::kNegative, extended()).assembled().matrix();
    CHECK(ref::rel(one, l.assembled().matrix().inverse()) <= 1e-14);
    CHECK(ref::rel(one, real3({1, 0.25, 0, -1, 0, 0, 0, 0, 0.25})) <= 1e-14);

    const Matrix at_identity = fracop::lambda312_fracpow(scalar(1.0), 0.5, Sign::kNegative).assembled().matrix();
    CHECK(ref::rel(at_identity, real3({1.5, 0.5, 0, -0.5, 0.5, 0, 0, 0, std::sqrt(0.5)})) <= 1e-14);
  }

  TEST_CASE("lambda4 examples") {
    const double h = std::sqrt(0.5);
    const Matrix m = fracop::lambda4_fracpow(scalar(1.0), 0.5, Sign::kNegative).assembled().matrix();
    CHECK(ref::rel(m, real3({h, 0, h, 0, 1, 0, -h, 0, h})) <= 1e-14);
    CHECK(ref::rel(m, ref::eigen_power(fracop::lambda4(scalar(1.0)).assembled().matrix(), -0.5)) <= 1e-12);

    const Matrix one = fracop::lambda4_fracpow(scalar(4.0), 1.0, Sign::kNegative, extended()).assembled().matrix();
    CHECK(ref::rel(one, real3({0, 0, 0.25, 0, 0.25, 0, -1, 0, 0})) <= 1e-14);

    const auto eye = OperatorMatrix::identity(2);
    for (double alpha : {0.2, 0.6, 0.9}) {
      const Matrix p = fracop::lambda4_fracpow(eye, alpha, Sign::kPositive).assembled().matrix();
      const Matrix q = fracop::lambda4_fracpow(eye, alpha, Sign::kNegative).assembled().matrix();
      CHECK(ref::rel(Matrix(p * q), Matrix(Matrix::Identity(6, 6))) <= 1e-14);
    }
  }

  TEST_CASE("lambda3 examples") {
    const Matrix one =
        fracop::lambda3_fracpow(scalar(2.0), scalar(3.0), scalar(1.0), 1.0, Sign::kNegative, extended()).assembled().matrix();
    CHECK(std::abs(one(2, 0) + 0.5) <= 1e-15);
    CHECK(ref::rel(one, fracop::lambda3(scalar(2.0), scalar(3.0), scalar(1.0)).assembled().matrix().inverse()) <= 1e-14);

    const auto eye = OperatorMatrix::identity(2);
    const auto b = fracop::lambda3_fracpow(scaled(eye, 5.0), scaled(eye, 2.0), scaled(eye, 0.5), 0.4, Sign::kNegative);
    const double expect = (std::pow(5.0, -0.4) - std::pow(0.5, -0.4)) / 4.5;
    CHECK(ref::rel(b.entry(2, 0).matrix(), Matrix(expect * Matrix::Identity(2, 2))) <= 1e-14);

    const Matrix half =
        fracop::lambda3_fracpow(scalar(2.0), scalar(3.0), scalar(1.0), 0.5, Sign::kNegative).assembled().matrix();
    CHECK(half(2, 0).real() == doctest::Approx(std::sqrt(0.5) - 1.0).epsilon(1e-14));
    CHECK(ref::rel(half, ref::eigen_power(fracop::lambda3(scalar(2.0), scalar(3.0), scalar(1.0)).assembled().matrix(),
                                          -0.5)) <= 1e-12);
  }

  TEST_CASE("closed form preconditions") {
    CHECK_THROWS_KIND(fracop::lambda1_fracpow(scalar(2.0), 1.0, Sign::kNegative), ErrorKind::kInvalidAlpha);
    CHECK_THROWS_KIND(fracop::lambda4_fracpow(scalar(2.0), 0.0, Sign::kNegative), ErrorKind::kInvalidAlpha);
    CHECK_THROWS_KIND(fracop::lambda312_fracpow(scalar(-2.0), 0.5, Sign::kNegative), ErrorKind::kNotPositive);
    CHECK_THROWS_KIND(fracop::lambda3_fracpow(scalar(2.0), scalar(3.0), scalar(2.0), 0.5, Sign::kNegative),
                      ErrorKind::kSingularDifference);
    RealMatrix n = RealMatrix::Identity(2, 2);
    n(0, 1) = 1.0;
    const OperatorMatrix shear(n);
    const OperatorMatrix other(RealMatrix(3.0 * n.transpose()));
    CHECK_THROWS_KIND(fracop::lambda3_fracpow(shear, scaled(shear, 2.0), other, 0.5, Sign::kNegative),
                      ErrorKind::kNonCommuting);
  }

  TEST_CASE("family parsing and generator recovery") {
    for (Family f : {Family::kLambda1, Family::kLambda312, Family::kLambda3, Family::kLambda4})
      CHECK(fracop::parse_family(fracop::to_string(f)) == f);
    CHECK_THROWS_KIND(fracop::parse_family("lambda2"), ErrorKind::kInvalidParams);
    const auto lap = fracop::DirichletLaplacian::make(3);
    CHECK_THROWS_KIND(fracop::family_generators(fracop::lambda4(lap.matrix), Family::kLambda1),
                      ErrorKind::kInvalidParams);
    const auto g = fracop::family_generators(fracop::lambda312(lap.matrix), Family::kLambda312);
    REQUIRE(g.size() == 1);
    CHECK(ref::rel(g[0].matrix(), lap.matrix.matrix()) <= 1e-15);
  }

  TEST_CASE("closed forms match the oracle on the Laplacian") {
    for (int n : {4, 8}) {
      const auto lap = fracop::DirichletLaplacian::make(n);
      for (const auto& c : cases(lap.matrix)) {
        CAPTURE(fracop::to_string(c.family));
        for (double alpha : {0.25, 0.5, 0.75}) {
          CHECK(ref::rel(closed(c, alpha, Sign::kNegative), ref::eigen_power(c.block.assembled().matrix(), -alpha)) <=
                1e-6);
          CHECK(ref::rel(closed(c, alpha, Sign::kPositive), ref::eigen_power(c.block.assembled().matrix(), alpha)) <=
                1e-6);
        }
      }
    }
  }

  TEST_CASE("inverse, continuity and semigroup laws") {
    const auto lap = fracop::DirichletLaplacian::make(6);
    for (const auto& c : cases(lap.matrix)) {
      CAPTURE(fracop::to_string(c.family));
      const Eigen::Index dim = c.block.assembled().dim();
      for (double alpha : {0.25, 0.5, 0.75}) {
        const Matrix prod = closed(c, alpha, Sign::kPositive) * closed(c, alpha, Sign::kNegative);
        CHECK(fracop::spectral_norm(Matrix(prod - Matrix::Identity(dim, dim))) <= 1e-8);
      }
      CHECK(ref::rel(closed(c, 1.0, Sign::kNegative, extended()), c.block.assembled().matrix().inverse()) <= 1e-10);
      CHECK(ref::rel(closed(c, 1.0, Sign::kPositive, extended()), c.block.assembled().matrix()) <= 1e-12);
      for (auto [a, b] : {std::pair{0.25, 0.5}, std::pair{0.1, 0.8}}) {
        const Matrix lhs = closed(c, a, Sign::kNegative) * closed(c, b, Sign::kNegative);
        CHECK(ref::rel(lhs, closed(c, a + b, Sign::kNegative)) <= 1e-6);
      }
    }
  }

  TEST_CASE("random commuting generators for lambda3") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.5, 4.0);
    for (int trial = 0; trial < 6; ++trial) {
      const Matrix base = ref::random_spd(rng, 5, 0.5, 5.0);
      const OperatorMatrix a1(Matrix(u(rng) * base)), a2(Matrix(u(rng) * base + Matrix::Identity(5, 5)));
      const OperatorMatrix a3(Matrix(base * base / 5.0 + 0.1 * Matrix::Identity(5, 5)));
      const double alpha = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
      const auto cf = fracop::lambda3_fracpow(a1, a2, a3, alpha, Sign::kNegative);
      const auto b = fracop::lambda3(a1, a2, a3);
      CHECK(ref::rel(cf.assembled().matrix(), ref::eigen_power(b.assembled().matrix(), -alpha)) <= 1e-8);
    }
  }

  TEST_CASE("second resolvent examples") {
    const auto s = fracop::second_resolvent_product(scalar(2.0), scalar(1.0), 0.0);
    CHECK(std::abs(s.value(0, 0) - 0.5) <= 1e-15);
    CHECK(std::abs(s.direct(0, 0) - 0.5) <= 1e-15);

    RealMatrix d = RealMatrix::Zero(3, 3);
    d.diagonal() << 1.0, 2.5, 7.0;
    const OperatorMatrix a2(d);
    const OperatorMatrix a1(RealMatrix(d + RealMatrix::Identity(3, 3)));
    CHECK(fracop::second_resolvent_product(a1, a2, 0.3).discrepancy <= 1e-12);

    const auto lap = fracop::DirichletLaplacian::make(8);
    const auto r = fracop::second_resolvent_product(scaled(lap.matrix, 2.0), lap.matrix, 1.0);
    CHECK(r.discrepancy <= 1e-10 * fracop::spectral_norm(r.value));
    CHECK_THROWS_KIND(fracop::second_resolvent_product(lap.matrix, lap.matrix, 1.0), ErrorKind::kSingularDifference);
  }

  TEST_CASE("resolvent product power examples") {
    const double half = 1.0 - std::sqrt(0.5);
    auto p = fracop::resolvent_product_fracpow(scalar(2.0), scalar(1.0), 0.5);
    CHECK(std::abs(p.value(0, 0) - half) <= 1e-14);
    // scalar integral by the independent exp-sinh rule
    const double integral = ref::exp_sinh([](double s) { return std::pow(s, -0.5) / ((s + 1.0) * (s + 2.0)); });
    CHECK(std::abs(p.quadrature.value(0, 0).real() - integral / std::numbers::pi) <= 1e-9);

    CHECK_THROWS_KIND(fracop::resolvent_product_fracpow(scalar(2.0), scalar(2.0), 0.5), ErrorKind::kSingularDifference);

    RealMatrix d1 = RealMatrix::Zero(2, 2), d2 = RealMatrix::Identity(2, 2);
    d1.diagonal() << 2.0, 3.0;
    p = fracop::resolvent_product_fracpow(OperatorMatrix(d1), OperatorMatrix(d2), 0.5);
    CHECK(std::abs(p.value(0, 0) - half) <= 1e-14);
    CHECK(std::abs(p.value(1, 1) - 0.5 * (1.0 - 1.0 / std::sqrt(3.0))) <= 1e-14);
    CHECK(p.discrepancy <= 1e-7);
  }

  TEST_CASE("spectral map examples") {
    auto m = fracop::spectral_map({Complex(4.0)}, 0.5);
    CHECK(std::abs(m[0] - 2.0) <= 1e-15);
    m = fracop::spectral_map({Complex(0.0, 1.0)}, 0.5);
    CHECK(std::abs(m[0] - std::polar(1.0, std::numbers::pi / 4.0)) <= 1e-15);
    const double a = 3.0, alpha = 0.7;
    m = fracop::spectral_map({Complex(a), Complex(0, std::sqrt(a)), Complex(0, -std::sqrt(a))}, alpha);
    CHECK(std::abs(m[0] - std::pow(a, alpha)) <= 1e-14);
    CHECK(std::abs(m[1] - std::polar(std::pow(a, alpha / 2), alpha * std::numbers::pi / 2)) <= 1e-14);
    CHECK(std::abs(m[2] - std::polar(std::pow(a, alpha / 2), -alpha * std::numbers::pi / 2)) <= 1e-14);
    CHECK_THROWS_KIND(fracop::spectral_map({Complex(-1.0)}, 0.5), ErrorKind::kBranchCutViolation);
    CHECK_THROWS_KIND(fracop::spectral_map({Complex(0.0)}, 0.5), ErrorKind::kBranchCutViolation);
  }

  TEST_CASE("spectrum report examples") {
    RealMatrix d = RealMatrix::Zero(2, 2);
    d.diagonal() << 1.0, 4.0;
    const auto l1 = fracop::lambda1(OperatorMatrix(d));
    const OperatorMatrix p1 = fracop::lambda1_fracpow(OperatorMatrix(d), 0.5, Sign::kNegative).assembled();
    auto rep = fracop::spectrum_report(l1, -0.5, p1);
    CHECK(rep.points.size() == 6);
    CHECK(rep.max_match_residual <= 1e-8);

    const auto l4 = fracop::lambda4(scalar(4.0));
    const OperatorMatrix p4 = fracop::lambda4_fracpow(scalar(4.0), 0.5, Sign::kPositive).assembled();
    rep = fracop::spectrum_report(l4, 0.5, p4);
    REQUIRE(rep.predicted.size() == 3);
    // lexicographic order: 1 - i, 1 + i, 2
    CHECK(std::abs(rep.predicted[0] - Complex(1, -1)) <= 1e-14);
    CHECK(std::abs(rep.predicted[1] - Complex(1, 1)) <= 1e-14);
    CHECK(std::abs(rep.predicted[2] - Complex(2, 0)) <= 1e-14);
    CHECK(rep.max_match_residual <= 1e-12);

    const auto lap = fracop::DirichletLaplacian::make(5);
    for (const auto& c : cases(lap.matrix)) {
      CHECK(fracop::spectrum_report(c.block, 1.0, c.block.assembled()).max_match_residual <= 1e-10);
      for (double alpha : {0.25, 0.5, 0.75}) {
        const OperatorMatrix p(closed(c, alpha, Sign::kNegative));
        CHECK(fracop::spectrum_report(c.block, -alpha, p).max_match_residual <= 1e-6);
      }
    }

    const std::string csv = fracop::spectrum_csv(rep);
    CHECK(csv.rfind("re_base,im_base,re_pred,im_pred,re_obs,im_obs,residual\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  }

  TEST_CASE("lambda4 base spectrum") {
    const auto lap = fracop::DirichletLaplacian::make(8);
    std::vector<Complex> expected;
    for (double mu : lap.analytic_eigs) {
      expected.emplace_back(mu);
      expected.emplace_back(0.0, std::sqrt(mu));
      expected.emplace_back(0.0, -std::sqrt(mu));
    }
    auto observed = fracop::eigenvalues(fracop::lambda4(lap.matrix).assembled());
    REQUIRE(observed.size() == expected.size());
    for (const Complex& e : expected) {
      double best = 1e300;
      for (const Complex& o : observed) best = std::min(best, std::abs(o - e));
      CHECK(best <= 1e-8 * std::max(1.0, std::abs(e)));
    }
  }
}
