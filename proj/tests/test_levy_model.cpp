#include <cmath>

#include <gtest/gtest.h>

#include "levyctl/errors.hpp"
#include "levyctl/levy_model.hpp"

using namespace levyctl;

namespace {

LevyModel bm(double sigma = 1.0, double gamma = 0.0) { return LevyModel::with_gamma(sigma, gamma); }
LevyModel cl() { return LevyModel::with_delta(0.0, 1.5, {{1.0, 1.0}}); }
LevyModel two_jumps() { return LevyModel::with_gamma(0.3, 0.1, {{1.0, 1.5}, {0.5, 4.0}}); }

// Plain composite Simpson on [0, L] for the jump part of psi.
double jump_part_simpson(double s, double rate, double decay) {
  const int n = 200000;
  const double L = 60.0 / decay, h = L / n;
  auto g = [&](double u) { return (std::exp(-s * u) - 1.0) * rate * decay * std::exp(-decay * u); };
  double acc = g(0.0) + g(L);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * g(i * h);
  return acc * h / 3.0;
}

}  // namespace

TEST(LaplaceExponent, BrownianMotionIsHalfSquare) { EXPECT_DOUBLE_EQ(bm().psi(2.0), 2.0); }

TEST(LaplaceExponent, VanishesAtZero) {
  for (const auto& m : {bm(), cl(), two_jumps()}) EXPECT_EQ(m.psi(0.0), 0.0);
}

TEST(LaplaceExponent, BoundedVariationFormMatchesQuadrature) {
  const double direct = 1.5 * 1.0 + jump_part_simpson(1.0, 1.0, 1.0);
  EXPECT_NEAR(cl().psi(1.0), direct, 1e-10);
  EXPECT_NEAR(cl().psi(1.0), 1.0, 1e-14);
}

TEST(PsiDerivative, KnownValues) {
  EXPECT_DOUBLE_EQ(bm(1.0, 0.3).psi_derivative(0.0, 1), 0.3);
  EXPECT_DOUBLE_EQ(bm().psi_derivative(1.0, 2), 1.0);
  EXPECT_NEAR(cl().psi_derivative(0.0, 1), 1.5 - 1.0 / 1.0, 1e-14);
}

TEST(PsiDerivative, MatchesCentralDifferences) {
  for (const auto& m : {bm(1.0, 0.3), cl(), two_jumps()})
    for (double s : {0.1, 0.5, 1.0, 3.0, 10.0}) {
      const double h = 1e-4 * std::max(1.0, s);
      const double d1 = (m.psi(s + h) - m.psi(s - h)) / (2 * h);
      const double d2 = (m.psi(s + h) - 2 * m.psi(s) + m.psi(s - h)) / (h * h);
      EXPECT_NEAR(m.psi_derivative(s, 1), d1, 1e-6 * std::max(1.0, std::abs(d1)));
      EXPECT_NEAR(m.psi_derivative(s, 2), d2, 1e-4 * std::max(1.0, std::abs(d2)));
    }
}

TEST(Phi, ClosedForms) {
  EXPECT_NEAR(bm().phi(0.5), 1.0, 1e-12);
  EXPECT_NEAR(bm(std::sqrt(2.0)).phi(2.0), std::sqrt(2.0), 1e-12);
}

TEST(Phi, CramerLundbergAgainstScalarBisection) {
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (1.5 * mid - mid / (1.0 + mid) - 0.1 > 0 ? hi : lo) = mid;
  }
  EXPECT_NEAR(cl().phi(0.1), 0.5 * (lo + hi), 1e-12);
}

TEST(Phi, InvertsPsi) {
  for (const auto& m : {bm(1.0, -0.2), cl(), two_jumps()})
    for (double q : {0.01, 0.1, 1.0, 10.0}) EXPECT_NEAR(m.psi(m.phi(q)), q, 1e-10 * q);
}

TEST(Psi, ConvexChords) {
  for (const auto& m : {bm(1.0, -0.4), cl(), two_jumps()})
    for (double s1 = 0.0; s1 < 5.0; s1 += 0.37) {
      const double s2 = s1 + 0.21, s3 = s1 + 0.55;
      const double w = (s3 - s2) / (s3 - s1);
      EXPECT_LE(m.psi(s2), w * m.psi(s1) + (1 - w) * m.psi(s3) + 1e-12);
    }
}

TEST(Variation, Classes) {
  EXPECT_EQ(bm().variation(), Variation::Unbounded);
  EXPECT_EQ(cl().variation(), Variation::Bounded);
  GeneralDensity g{[](double u) { return std::pow(u, -1.5); }};
  g.finite_variation = false;
  EXPECT_EQ(LevyModel::with_gamma(0.0, 1.0, {}, g).variation(), Variation::Unbounded);
}

TEST(Model, RejectsNegativeSubordinator) {
  EXPECT_THROW(LevyModel::with_delta(0.0, -0.1, {{1.0, 1.0}}), ValidationError);
  EXPECT_THROW(LevyModel::with_delta(0.0, 0.0), ValidationError);
}

TEST(Model, RejectsBadJumps) {
  EXPECT_THROW(LevyModel::with_gamma(1.0, 0.0, {{1.0, 1.0}, {2.0, 1.0}}), ValidationError);
  EXPECT_THROW(LevyModel::with_gamma(1.0, 0.0, {{-1.0, 1.0}}), ValidationError);
}

TEST(Model, InfiniteMeanReported) {
  GeneralDensity g{[](double u) { return u > 1.0 ? std::pow(u, -1.5) : 0.0; }};
  g.finite_variation = true;
  g.finite_activity = true;
  g.finite_mean = false;
  const auto m = LevyModel::with_gamma(1.0, 0.0, {}, g);
  EXPECT_FALSE(std::isfinite(m.psi_derivative(0.0, 1)));
}
