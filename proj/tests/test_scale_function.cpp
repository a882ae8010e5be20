#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "levyctl/scale_function.hpp"

using namespace levyctl;

namespace {

LevyModel bm() { return LevyModel::with_gamma(1.0, 0.0); }
LevyModel cl() { return LevyModel::with_delta(0.0, 1.5, {{1.0, 1.0}}); }
LevyModel two_jumps() { return LevyModel::with_gamma(0.3, 0.1, {{1.0, 1.5}, {0.5, 4.0}}); }

template <class F>
double simpson(const F& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

// Trapezoid with the first Euler-Maclaurin end correction.
template <class F, class D>
double corrected_trapezoid(const F& f, const D& df, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double acc = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) acc += f(a + i * h);
  return acc * h - h * h / 12.0 * (df(b) - df(a));
}

}  // namespace

TEST(ScaleFunction, BrownianClosedForm) {
  ScaleFamily pf(bm(), 0.5);
  ScaleFamily inv(bm(), 0.5, Backend::LaplaceInversion);
  for (double x : {0.5, 1.0, 2.0}) {
    EXPECT_NEAR(pf.W(x), std::exp(x) - std::exp(-x), 1e-12);
    EXPECT_NEAR(inv.W(x), std::exp(x) - std::exp(-x), 1e-8);
  }
}

TEST(ScaleFunction, ZeroOnNegativeHalfLine) {
  for (const auto& m : {bm(), cl(), two_jumps()}) EXPECT_EQ(ScaleFamily(m, 0.5).W(-1.0), 0.0);
}

TEST(ScaleFunction, ValueAndSlopeAtZero) {
  ScaleFamily c(cl(), 0.1);
  EXPECT_NEAR(c.W(0.0), 1.0 / 1.5, 1e-12);
  EXPECT_NEAR(c.W_prime(0.0), (0.1 + 1.0) / (1.5 * 1.5), 1e-10);
  ScaleFamily b(bm(), 0.5);
  EXPECT_NEAR(b.W(0.0), 0.0, 1e-14);
  EXPECT_NEAR(b.W_prime(0.0), 2.0, 1e-10);
  EXPECT_EQ(b.W_prime(-0.5), 0.0);
}

TEST(ScaleFunction, DerivedFamilyBelowZero) {
  ScaleFamily f(two_jumps(), 0.5);
  EXPECT_EQ(f.Z(-2.0), 1.0);
  EXPECT_EQ(f.Zbar(-2.0), -2.0);
  EXPECT_EQ(f.Wbar(-2.0), 0.0);
}

TEST(ScaleFunction, ZOfBrownianMotion) {
  ScaleFamily f(bm(), 0.5);
  const double sym = 1.0 + 0.5 * (std::exp(1.0) + std::exp(-1.0) - 2.0);
  const double quad = 1.0 + 0.5 * simpson([](double y) { return std::exp(y) - std::exp(-y); }, 0.0, 1.0);
  EXPECT_NEAR(sym, quad, 1e-12);
  EXPECT_NEAR(f.Z(1.0), sym, 1e-12);
}

TEST(ScaleFunction, ThetaPositive) {
  for (const auto& m : {bm(), cl(), two_jumps()}) {
    ScaleFamily f(m, 0.5);
    for (double y = 0.01; y <= 10.0; y += 0.0999) EXPECT_GT(f.Theta(y), 0.0) << y;
  }
}

TEST(ScaleFunction, LaplaceIdentity) {
  for (const auto& m : {bm(), cl(), two_jumps()})
    for (double q : {0.1, 0.5, 2.0}) {
      ScaleFamily f(m, q);
      for (double ds : {0.5, 1.0, 2.0}) {
        const double s = f.phi() + ds;
        const double xmax = (std::log(1e12) + std::log(1.0 / (ds * f.psi_prime_phi()) + 1.0)) / ds;
        const double lhs = simpson([&](double x) { return std::exp(-s * x) * f.W(x); }, 0.0, xmax, 40000);
        const double rhs = 1.0 / (m.psi(s) - q);
        EXPECT_NEAR(lhs / rhs, 1.0, 1e-6) << "q=" << q << " s=" << s;
      }
    }
}

TEST(ScaleFunction, ExponentialAsymptotics) {
  for (const auto& m : {bm(), cl(), two_jumps()}) {
    ScaleFamily f(m, 0.5);
    const double x = 40.0 / f.phi();
    const double ratio = f.W(x) * std::exp(-f.phi() * x) * f.psi_prime_phi();
    EXPECT_NEAR(ratio, 1.0, 1e-3);
    EXPECT_NEAR(f.W_prime(x) / f.W(x), f.phi(), 1e-3 * f.phi());
    EXPECT_NEAR(f.Z(x) / f.W(x), 0.5 / f.phi(), 1e-3);
    EXPECT_NEAR(f.Zbar(x) / f.W(x), 0.5 / (f.phi() * f.phi()), 1e-3);
  }
}

TEST(ScaleFunction, LogConcave) {
  for (const auto& m : {bm(), cl(), two_jumps()}) {
    ScaleFamily f(m, 0.5);
    double prev = INFINITY;
    for (double x = 0.05; x < 15.0; x += 0.1) {
      const double r = f.W_prime(x) / f.W(x);
      EXPECT_LE(r, prev + 1e-12) << x;
      prev = r;
    }
  }
}

TEST(ScaleFunction, BackendsAgree) {
  for (const auto& m : {bm(), cl(), two_jumps()}) {
    ScaleFamily pf(m, 0.5), inv(m, 0.5, Backend::LaplaceInversion);
    for (double x = 0.01; x <= 20.0; x *= 1.4) {
      EXPECT_NEAR(inv.W(x) / pf.W(x), 1.0, 1e-6) << x;
      EXPECT_NEAR(inv.Z(x) / pf.Z(x), 1.0, 1e-6) << x;
      EXPECT_NEAR(inv.Wbar(x) / pf.Wbar(x), 1.0, 1e-6) << x;
    }
  }
}

TEST(PhiIntegral, VanishesBelowLowerEnd) {
  ScaleFamily f(bm(), 0.5);
  EXPECT_EQ(f.phi_integral(1.0, 0.5, [](double) { return 1.0; }), 0.0);
}

TEST(PhiIntegral, ConstantGivesWbar) {
  ScaleFamily f(two_jumps(), 0.5);
  EXPECT_NEAR(f.phi_integral(-0.3, 1.7, [](double) { return 1.0; }), f.Wbar(2.0), 1e-10);
}

TEST(PhiIntegral, LinearAgainstTrapezoid) {
  ScaleFamily f(bm(), 0.5);
  auto g = [](double y) { return (std::exp(1 - y) - std::exp(y - 1)) * y; };
  auto dg = [](double y) {
    return -(std::exp(1 - y) + std::exp(y - 1)) * y + (std::exp(1 - y) - std::exp(y - 1));
  };
  EXPECT_NEAR(f.phi_integral(0.0, 1.0, [](double y) { return y; }), corrected_trapezoid(g, dg, 0.0, 1.0),
              1e-8);
}

TEST(PsiIntegral, ClosedForms) {
  ScaleFamily f(two_jumps(), 0.5);
  EXPECT_NEAR(f.psi_integral(0.3, [](double) { return 2.5; }, 0.0), 2.5 / f.phi(), 1e-10);
  EXPECT_NEAR(f.psi_integral(0.0, [](double y) { return y; }, 0.0), 1.0 / (f.phi() * f.phi()), 1e-10);
}

TEST(PsiIntegral, SquareAgainstGrid) {
  ScaleFamily f(bm(), 0.5);
  auto h = [](double y) { return y > 0 ? y * y : 0.0; };
  // kink of h(y - 1) at y = 1
  const double ref = simpson([&](double y) { return std::exp(-y) * h(y - 1.0); }, 1.0, 40.0, 40000);
  const double breaks[] = {0.0};
  EXPECT_NEAR(f.psi_integral(-1.0, h, 0.0, breaks), ref, 1e-8);
}

TEST(PsiIntegral, RejectsDivergentGrowth) {
  ScaleFamily f(bm(), 0.5);
  EXPECT_ANY_THROW(f.psi_integral(0.0, [](double y) { return std::exp(2 * y); }, 2.0));
}

TEST(PhiIntegral, RatioTendsToPsi) {
  ScaleFamily f(two_jumps(), 0.5);
  auto h = [](double y) { return std::sin(y) + 2.0; };
  const double s = 0.2, x = s + 40.0 / f.phi();
  EXPECT_NEAR(f.phi_integral(s, x, h) / f.W(x - s), f.psi_integral(s, h, 0.0), 1e-3);
}

TEST(GeneralDensity, MatchesHyperexponentialScaleFunction) {
  // the same exponential jumps given as a density take the generic inversion path
  GeneralDensity g;
  g.density = [](double u) { return 2.0 * 1.5 * std::exp(-1.5 * u); };
  g.finite_variation = true;
  g.finite_activity = true;
  ScaleFamily gen(LevyModel::with_gamma(0.5, 0.2, {}, g), 0.5, Backend::LaplaceInversion);
  ScaleFamily pf(LevyModel::with_gamma(0.5, 0.2, {{2.0, 1.5}}), 0.5);
  EXPECT_NEAR(gen.phi(), pf.phi(), 1e-10);
  for (double x : {0.05, 0.5, 2.0, 6.0}) {
    EXPECT_NEAR(gen.W(x) / pf.W(x), 1.0, 1e-6) << x;
    EXPECT_NEAR(gen.W_prime(x) / pf.W_prime(x), 1.0, 1e-6) << x;
  }
}

TEST(GeneralDensity, InfiniteActivityBoundedVariation) {
  // nu(du) = u^{-3/2} e^{-u} du: psi(s) = delta s - 2 sqrt(pi) (sqrt(1 + s) - 1)
  GeneralDensity g;
  g.density = [](double u) { return std::exp(-u) / (u * std::sqrt(u)); };
  g.finite_variation = true;
  g.finite_activity = false;
  const auto m = LevyModel::with_delta(0.0, 5.0, {}, g);
  for (double s : {0.5, 3.0}) EXPECT_NEAR(m.psi(s), 5 * s - 2 * std::sqrt(M_PI) * (std::sqrt(1 + s) - 1), 1e-10);
  ScaleFamily f(m, 0.5, Backend::LaplaceInversion);
  EXPECT_EQ(f.W0(), 0.2);
  EXPECT_TRUE(std::isinf(f.W_prime0()));
  EXPECT_NEAR(f.W(1e-8), 0.2, 1e-3);
  const double s = f.phi() + 1.0;
  // x = t^2 removes the square-root behaviour of W at 0
  const double lhs =
      simpson([&](double t) { return 2 * t * std::exp(-s * t * t) * f.W(t * t); }, 0.0, std::sqrt(30.0), 400);
  EXPECT_NEAR(lhs * (m.psi(s) - 0.5), 1.0, 1e-4);
}
