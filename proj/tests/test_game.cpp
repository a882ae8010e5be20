#include <cmath>

#include <gtest/gtest.h>

#include "levyctl/fluctuation.hpp"
#include "levyctl/game.hpp"
#include "levyctl/mc_oracle.hpp"
#include "levyctl/numerics.hpp"

using namespace levyctl;

namespace {

LevyModel jump_bm() { return LevyModel::with_delta(1.0, 2.0, {{2.0, 1.0}}); }

GameSpec cds(double p = 0.2, double gamma_S = 0.3, double gamma_I = 0.1, LevyModel m = jump_bm()) {
  return {ScaleFamily(m, 0.5), p, gamma_S, gamma_I};
}

}  // namespace

TEST(Zeta, DefaultRegion) {
  const auto s = cds();
  for (double x : {-1.0, 0.0}) {
    EXPECT_EQ(zeta(s, x), 1.0);
    const auto g = payoffs(s, x);
    EXPECT_EQ(g.g_S, 0.0);
    EXPECT_EQ(g.g_I, 0.0);
    EXPECT_EQ(g.g, 0.0);
  }
}

TEST(Payoffs, FeeGap) {
  const auto s = cds();
  for (double x : {0.1, 1.0, 7.0}) {
    const auto g = payoffs(s, x);
    EXPECT_NEAR(g.g_I - g.g_S, 0.4, 1e-14);
  }
}

TEST(Zeta, MonteCarlo) {
  const auto s = cds();
  SimConfig cfg;
  cfg.n_paths = 100000;
  const auto est = mc::ruin_laplace(jump_bm(), 0.5, 1.0, cfg);
  const double slope = std::abs(zeta(s, 1.0 + 1e-5) - zeta(s, 1.0 - 1e-5)) / 2e-5;
  EXPECT_NEAR(est.mean, zeta(s, 1.0), 3 * est.std_error + mc::dt_allowance(cfg.dt, slope));
}

TEST(GameLambda, DiagonalLimit) {
  for (const auto& s : {cds(), cds(0.15), cds(0.3, 0.05, 0.2)})
    for (double a : {0.3, 1.0, 2.5}) EXPECT_NEAR(Lambda_game(s, a, a), -(s.gamma_S + s.gamma_I), 1e-8);
}

TEST(GameLambda, DerivativeMatchesFiniteDifference) {
  const auto s = cds();
  const double h = 1e-4;
  for (double a : {0.5, 1.0})
    for (double b : {1.2, 3.0, 6.0}) {
      const double fd = (Lambda_game(s, a, b + h) - Lambda_game(s, a, b - h)) / (2 * h);
      EXPECT_NEAR(lambda_game(s, a, b), fd, 1e-5);
      const double fd2 = (lambda_game(s, a, b + h) - lambda_game(s, a, b - h)) / (2 * h);
      EXPECT_NEAR(lambda_game_prime(s, a, b), fd2, 1e-4);
    }
}

TEST(GameLambda, StableAndDirectFormsAgree) {
  const auto s = cds();
  for (double a : {0.4, 1.0})
    for (double b : {1.5, 4.0, 8.0}) {
      EXPECT_NEAR(Lambda_game(s, a, b), Lambda_game_direct(s, a, b), 1e-9);
      EXPECT_NEAR(lambda_game(s, a, b), lambda_game_direct(s, a, b), 1e-9);
    }
}

TEST(HatLambda, PureBrownian) {
  const auto s = cds(0.15, 0.3, 0.1, LevyModel::with_gamma(1.0, 0.2));
  for (double a : {0.1, 1.0, 5.0}) EXPECT_NEAR(hat_lambda(s, a), -(0.15 + 0.5 * 0.1), 1e-14);
}

TEST(HatLambda, DecreasingInBothArguments) {
  const auto s = cds();
  const double beta = 5.0;
  double prev = INFINITY;
  for (double a : linspace(0.05, 4.9, 40)) {
    const double v = hat_lambda(s, a, beta);
    EXPECT_LE(v, prev + 1e-12);
    prev = v;
  }
  prev = INFINITY;
  for (double b : linspace(1.05, 12.0, 40)) {
    const double v = hat_lambda(s, 1.0, b);
    EXPECT_LE(v, prev + 1e-12);
    prev = v;
  }
}

TEST(AlphaBounds, ClosedForm) {
  const auto b = alpha_bounds(cds(0.1));
  EXPECT_NEAR(b.alphabar, std::log(12.0), 1e-10);
  EXPECT_GT(b.alphaunder, 0.0);
  EXPECT_LT(b.alphaunder, b.alphabar);
}

TEST(AlphaBounds, SmallJumpMassClampsToZero) {
  // nu-bar(0+) = 0.1 <= (p + q gamma_I) / (1 - gamma_I)
  const auto s = cds(0.15, 0.3, 0.1, LevyModel::with_delta(1.0, 2.0, {{0.1, 1.0}}));
  const auto b = alpha_bounds(s);
  EXPECT_EQ(b.alphabar, 0.0);
  EXPECT_EQ(b.alphaunder, 0.0);
}

TEST(GameSolve, InteriorPair) {
  const auto sol = solve(cds());
  ASSERT_EQ(sol.kind, GameCase::Interior);
  EXPECT_LE(std::abs(sol.residual_Lambda), 1e-8);
  EXPECT_LE(std::abs(sol.residual_lambda), 1e-8);
  EXPECT_LE(sol.alphaunder, sol.alpha_star);
  EXPECT_LT(sol.alpha_star, sol.alphabar);
  EXPECT_LT(sol.alphabar, sol.beta_star);
  EXPECT_NEAR(Lambda_game(sol.spec, sol.alpha_star, sol.beta_star), 0.0, 1e-8);
}

TEST(GameSolve, ZeroNetFeeGivesInfiniteBeta) {
  // p / q = gamma_S: the sup player's stopping payoff never turns positive
  const auto sol = solve(cds(0.15));
  EXPECT_EQ(sol.kind, GameCase::BetaInfinite);
  EXPECT_TRUE(std::isinf(sol.beta_star));
  EXPECT_DOUBLE_EQ(sol.alpha_star, sol.alphaunder);
  // increases to its limit p/q - gamma_S = 0 without crossing it
  double prev = -INFINITY;
  for (double d : {5.0, 10.0, 20.0, 30.0, 40.0}) {
    const double L = Lambda_game(sol.spec, sol.alphaunder, sol.alphaunder + d);
    EXPECT_GT(L, prev);
    EXPECT_LT(L, 0.0);
    prev = L;
  }
  EXPECT_NEAR(prev, 0.15 / 0.5 - 0.3, 1e-6);
}

TEST(GameSolve, PureBrownianIsNotInterior) {
  const auto sol = solve(cds(0.15, 0.3, 0.1, LevyModel::with_gamma(1.0, 0.2)));
  EXPECT_NE(sol.kind, GameCase::Interior);
  EXPECT_EQ(sol.alpha_star, 0.0);
}

TEST(GameSolve, SupFeeSweepMonotone) {
  double prev = 0.0;
  for (double g : {0.1, 0.2, 0.3}) {
    const auto sol = solve(cds(0.2, g));
    ASSERT_EQ(sol.kind, GameCase::Interior);
    EXPECT_GE(sol.beta_star, prev);
    prev = sol.beta_star;
  }
}

TEST(GameValue, PiecewiseStructure) {
  const auto sol = solve(cds());
  for (double x : {0.1, 0.5, sol.alpha_star}) EXPECT_NEAR(value(sol, x), payoffs(sol.spec, x).g_I, 1e-12);
  for (double x : {sol.beta_star, sol.beta_star + 2.0}) EXPECT_NEAR(value(sol, x), payoffs(sol.spec, x).g_S, 1e-12);
  for (double x : linspace(0.01, sol.beta_star + 2, 200)) {
    EXPECT_GE(value(sol, x), payoffs(sol.spec, x).g_S - 1e-9);
    EXPECT_LE(value(sol, x), payoffs(sol.spec, x).g_I + 1e-9);
  }
}

TEST(GameValue, FitConditions) {
  const auto sol = solve(cds());
  const double e = 1e-7;
  const double b = sol.beta_star, a = sol.alpha_star;
  EXPECT_NEAR(value(sol, b - e), payoffs(sol.spec, b).g_S, 1e-6);
  const double gs_slope = (payoffs(sol.spec, b + 1e-5).g_S - payoffs(sol.spec, b - 1e-5).g_S) / 2e-5;
  EXPECT_NEAR(value_prime(sol, b - e), gs_slope, 1e-5);
  EXPECT_NEAR(value(sol, a + e), payoffs(sol.spec, a).g_I, 1e-6);
  const double gi_slope = (payoffs(sol.spec, a + 1e-5).g_I - payoffs(sol.spec, a - 1e-5).g_I) / 2e-5;
  EXPECT_NEAR(value_prime(sol, a + e), gi_slope, 1e-5);
}

TEST(GameValue, CurveShapeAlongOptimalAlpha) {
  const auto sol = solve(cds());
  for (double b : linspace(sol.alpha_star + 1e-3, sol.beta_star - 1e-3, 60)) {
    EXPECT_LE(Lambda_game(sol.spec, sol.alpha_star, b), 1e-8);
    EXPECT_GE(lambda_game(sol.spec, sol.alpha_star, b), -1e-8);
  }
}

TEST(GameVi, NoFailures) {
  const auto sol = solve(cds());
  const auto rep = vi_check(sol, linspace(0.02, sol.beta_star + 3.0, 200));
  EXPECT_EQ(rep.count(CheckStatus::Fail), 0);
  EXPECT_GT(rep.count(CheckStatus::Pass), 400);
}

TEST(GameVi, GeneratorBelowAlphaIsHatLambda) {
  const auto sol = solve(cds());
  TestFunction v{[&](double y) { return value(sol, y); }, [&](double y) { return value_prime(sol, y); },
                 [&](double y) { return value_second(sol, y); }, {0.0, sol.alpha_star, sol.beta_star}};
  for (double x : {0.3, 0.6}) {
    const double gen = apply_generator(sol.spec.family.model(), 0.5, v, x);
    EXPECT_NEAR(gen, hat_lambda(sol.spec, x), 1e-5);
    EXPECT_GT(gen, 0.0);
  }
}

TEST(GameValue, MonteCarloContract) {
  const auto sol = solve(cds());
  SimConfig cfg;
  cfg.n_paths = 100000;
  const double x = 0.5 * (sol.alpha_star + sol.beta_star);
  const auto est = mc::game_payoff(sol.spec, sol.alpha_star, sol.beta_star, x, cfg);
  const double slope = std::abs(value_prime(sol, sol.alpha_star + 1e-9)) + std::abs(value_prime(sol, sol.beta_star - 1e-9));
  EXPECT_NEAR(est.mean, contract_value(sol, x), 3 * est.std_error + mc::dt_allowance(cfg.dt, slope));
}
