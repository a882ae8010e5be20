#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "levyctl/mc_oracle.hpp"
#include "levyctl/numerics.hpp"
#include "levyctl/singular_control.hpp"

using namespace levyctl;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
LevyModel bm() { return LevyModel::with_gamma(1.0, 0.0); }
const PiecewisePolynomial kSquare({0.0, 0.0, 1.0});

SingularProblem quadratic(LevyModel m = bm()) {
  return {ScaleFamily(m, 0.5), kSquare, 0.5, 0.5, Interval{}};
}

SingularProblem dual_dividend(double beta) {
  return {ScaleFamily(bm(), 0.5), PiecewisePolynomial(), -1.0, beta, Interval{-kInf, 0.0}};
}

SingularProblem sn_dividend(double beta) {
  return {ScaleFamily(bm(), 0.5), PiecewisePolynomial(), beta, -1.0, Interval{0.0, kInf}};
}

}  // namespace

TEST(FTildePrime, Examples) {
  SingularProblem zero{ScaleFamily(bm(), 0.5), PiecewisePolynomial(), 1.0, 0.5, Interval{}};
  EXPECT_DOUBLE_EQ(f_tilde_prime(zero, 3.0), 0.5);
  SingularProblem sq{ScaleFamily(bm(), 0.5), kSquare, 1.0, 0.5, Interval{}};
  EXPECT_DOUBLE_EQ(f_tilde_prime(sq, 1.0), 2.5);
  SingularProblem ab{ScaleFamily(bm(), 0.5), PiecewisePolynomial::abs_kink(0.0, -1.0, 1.0), 1.0, 0.5,
                     Interval{}};
  EXPECT_DOUBLE_EQ(f_tilde_prime(ab, 0.0), 1.5);
}

TEST(SingularLambda, DiagonalAndZeroCost) {
  const auto p = quadratic();
  EXPECT_NEAR(Lambda(p, 0.3, 0.3), 1.0, 1e-14);
  SingularProblem zero{ScaleFamily(bm(), 0.5), PiecewisePolynomial(), 0.7, 0.4, Interval{}};
  for (double b : {0.5, 1.5, 4.0}) EXPECT_NEAR(Lambda(zero, -0.2, b), 0.4 + 0.7 * zero.family.Z(b + 0.2), 1e-10);
}

TEST(SingularLambda, DerivativeMatchesFiniteDifference) {
  const auto p = quadratic(LevyModel::with_gamma(0.5, 0.1, {{1.0, 2.0}}));
  const double h = 1e-4;
  for (double a : {-1.0, -0.5})
    for (double b : {0.0, 0.7, 1.6}) {
      const double fd = (Lambda(p, a, b + h) - Lambda(p, a, b - h)) / (2 * h);
      EXPECT_NEAR(lambda_b(p, a, b), fd, 1e-5);
    }
}

TEST(ThresholdBounds, Quadratic) {
  // f~' = 2x + 0.25, Psi(x; f~') = (2x + 2 + 0.25) / Phi with Phi = 1
  const auto tb = threshold_bounds(quadratic());
  EXPECT_NEAR(tb.abar, -0.125, 1e-12);
  EXPECT_NEAR(tb.aunder, -1.125, 1e-10);
  SingularProblem cu{ScaleFamily(bm(), 0.5), kSquare, 1.0, 1.0, Interval{}};
  EXPECT_NEAR(threshold_bounds(cu).abar, -0.25, 1e-12);
}

TEST(ThresholdBounds, ConstantSignClampsToLowerEnd) {
  SingularProblem zero{ScaleFamily(bm(), 0.5), PiecewisePolynomial(), 1.0, 0.5, Interval{-3.0, 5.0}};
  EXPECT_EQ(threshold_bounds(zero).abar, -3.0);
}

TEST(SingularSolve, DualDividendClosedForm) {
  // Z(y) = cosh(y) for Brownian motion at q = 1/2
  for (double beta : {1.2, 1.5, 3.0}) {
    const auto s = solve(dual_dividend(beta));
    EXPECT_EQ(s.kind, SingularCase::DividendDual);
    EXPECT_NEAR(s.a_star, -std::acosh(beta), 1e-10);
    EXPECT_EQ(s.b_star, 0.0);
  }
}

TEST(SingularSolve, QuadraticInstance) {
  const auto s = solve(quadratic());
  ASSERT_EQ(s.kind, SingularCase::Interior);
  EXPECT_LE(std::abs(s.residual_Lambda), 1e-8);
  EXPECT_LE(std::abs(s.residual_lambda), 1e-8);
  EXPECT_LE(s.aunder, s.a_star);
  EXPECT_LT(s.a_star, s.abar);
  EXPECT_LT(s.abar, s.b_star);
}

TEST(SingularSolve, SymmetricInstance) {
  const auto s = solve(quadratic());
  EXPECT_NEAR(s.a_star, -s.b_star, 1e-6);
}

TEST(SingularValue, SlopesAtThresholds) {
  const auto s = solve(quadratic());
  EXPECT_NEAR(value_prime(s, s.a_star - 0.5), -0.5, 1e-10);
  EXPECT_NEAR(value_prime(s, s.b_star), 0.5, 1e-8);
  EXPECT_NEAR(value_prime(s, s.b_star + 1.0), 0.5, 1e-10);
}

TEST(SingularValue, SmoothFit) {
  const auto s = solve(quadratic());
  const double e = 1e-7;
  for (double t : {s.a_star, s.b_star}) {
    EXPECT_NEAR(value_prime(s, t - e), value_prime(s, t + e), 1e-5);
    EXPECT_NEAR(value_second(s, t - e), value_second(s, t + e), 1e-3);
  }
}

TEST(SingularValue, FirstOrderConditions) {
  const auto s = solve(quadratic());
  const auto& p = s.problem;
  const double h = 1e-4;
  for (double x : {-0.5, 0.0, 0.4}) {
    const double da = (value_ab(p, s.a_star + h, s.b_star, x) - value_ab(p, s.a_star - h, s.b_star, x)) / (2 * h);
    const double db = (value_ab(p, s.a_star, s.b_star + h, x) - value_ab(p, s.a_star, s.b_star - h, x)) / (2 * h);
    EXPECT_LE(std::abs(da), 1e-4);
    EXPECT_LE(std::abs(db), 1e-4);
  }
}

TEST(SingularValue, DominatesPerturbations) {
  const auto s = solve(quadratic());
  const double vstar = value(s, 0.0);
  for (int i = -10; i <= 10; ++i)
    for (int j = -10; j <= 10; ++j) {
      const double a = s.a_star + 0.03 * i, b = s.b_star + 0.03 * j;
      EXPECT_LE(vstar, value_ab(s.problem, a, b, 0.0) + 1e-8) << a << " " << b;
    }
}

TEST(SingularValue, ConvexForConvexCost) {
  const auto s = solve(quadratic());
  double prev = -kInf;
  for (double x : linspace(s.a_star - 2, s.b_star + 2, 200)) {
    const double d = value_prime(s, x);
    EXPECT_GE(d, prev - 1e-9);
    prev = d;
  }
}

TEST(SingularValue, LambdaNonnegativeAlongOptimalA) {
  const auto s = solve(quadratic());
  for (double x : linspace(s.a_star, s.b_star, 50)) EXPECT_GE(Lambda(s.problem, s.a_star, x), -1e-8);
}

TEST(SingularVi, NoFailures) {
  for (const auto& m : {bm(), LevyModel::with_gamma(0.5, 0.1, {{1.0, 2.0}})}) {
    const auto s = solve(quadratic(m));
    const auto rep = vi_check(s, linspace(s.a_star - 1.5, s.b_star + 1.5, 41));
    EXPECT_EQ(rep.count(CheckStatus::Fail), 0);
    EXPECT_GT(rep.count(CheckStatus::Pass), 0);
  }
}

TEST(SingularVi, BelowAStarEqualsCostDifference) {
  const auto s = solve(quadratic());
  const auto ftilde = [&](double x) { return x * x + 0.25 * x; };
  for (double x : {s.a_star - 1.0, s.a_star - 0.3}) {
    TestFunction v{[&](double y) { return value(s, y); }, [&](double y) { return value_prime(s, y); },
                   [&](double y) { return value_second(s, y); }, {s.a_star, s.b_star}};
    const double lhs = apply_generator(s.problem.family.model(), 0.5, v, x) + x * x;
    EXPECT_NEAR(lhs, ftilde(x) - ftilde(s.a_star), 1e-5);
    EXPECT_GE(lhs, 0.0);
  }
}

TEST(SingularVi, DualDividendVacuousAbove) {
  const auto s = solve(dual_dividend(1.5));
  const auto rep = vi_check(s, linspace(-3.0, 0.0, 31));
  EXPECT_EQ(rep.count(CheckStatus::Fail), 0);
}

TEST(SingularSolve, SpectrallyNegativeDividend) {
  double prev = 0.0;
  for (double beta : {1.2, 1.5, 2.0, 3.0}) {
    const auto s = solve(sn_dividend(beta));
    ASSERT_EQ(s.kind, SingularCase::DividendSN);
    EXPECT_EQ(s.a_star, 0.0);
    EXPECT_LE(std::abs(s.residual_Lambda), 1e-8);
    EXPECT_GT(s.b_star, prev);
    prev = s.b_star;
  }
  const auto s = solve(sn_dividend(1.5));
  const double h = 1e-4, x = s.b_star / 2;
  const double db = (value_ab(s.problem, 0.0, s.b_star + h, x) - value_ab(s.problem, 0.0, s.b_star - h, x)) / (2 * h);
  EXPECT_LE(std::abs(db), 1e-5);
}

TEST(SingularValue, MonteCarloAtZero) {
  const auto s = solve(quadratic());
  SimConfig cfg;
  cfg.n_paths = 100000;
  const auto& p = s.problem;
  const auto est = mc::npv_doubly_reflected(p.family.model(), 0.5, s.a_star, s.b_star, p.f, p.C_U, p.C_D, 0.0, cfg);
  EXPECT_NEAR(est.mean, value(s, 0.0), 3 * est.std_error + mc::dt_allowance(cfg.dt, 1.0));
}
