#pragma once

#include <string>
#include <vector>

#include "levyctl/scale_function.hpp"
#include "levyctl/sim_config.hpp"
#include "levyctl/verification.hpp"

namespace levyctl {

/// Credit default swap with cancellation: the sup player pays premium p and
/// receives 1 at default; either side may cancel for a fee.
struct GameSpec {
  ScaleFamily family;
  double p;
  double gamma_S;  // paid by the sup player when it cancels
  double gamma_I;  // paid by the inf player when it cancels
};

/// 1: 0 < alpha* < beta* < inf, 2: beta* = inf, 3: alpha* = 0, 4: alpha* = 0 and beta* = inf.
enum class GameCase { Interior = 1, BetaInfinite = 2, AlphaZero = 3, Degenerate = 4 };
const char* to_string(GameCase c);

struct GameOptions {
  double tol_fit = 1e-8;
  double tol_vi = 1e-5;
};

struct AlphaBounds {
  double alphaunder;
  double alphabar;
};

struct GameSolution {
  GameSpec spec;
  GameCase kind;
  double alpha_star;
  double beta_star;  // +inf in cases 2 and 4
  double alphaunder;
  double alphabar;
  double residual_Lambda;
  double residual_lambda;
  /// Lambda(alpha*, beta*) / W(beta* - alpha*), the slope multiplier of the value.
  double kappa;
  /// Psi(alpha*; hat lambda) as solved (0 at alphaunder); used in place of a
  /// recomputation whose rounding exp(Phi (x - alpha*)) would amplify.
  double psi_alpha;
  std::vector<std::string> warnings;
};

struct Payoffs {
  double g_S;
  double g_I;
  double g;
};

void validate(const GameSpec& spec);

double zeta(const GameSpec& spec, double x);
Payoffs payoffs(const GameSpec& spec, double x);
/// Value of the plain contract without cancellation, (p/q + 1) zeta - p/q.
double cds_value(const GameSpec& spec, double x);

/// nu(-inf, -x)
double nu_bar(const GameSpec& spec, double x);

double Lambda_game(const GameSpec& spec, double alpha, double beta);
/// d Lambda / d beta
double lambda_game(const GameSpec& spec, double alpha, double beta);
/// d^2 Lambda / d beta^2
double lambda_game_prime(const GameSpec& spec, double alpha, double beta);
/// Scale-function convolution forms of Lambda and lambda; fine for moderate beta - alpha.
double Lambda_game_direct(const GameSpec& spec, double alpha, double beta);
double lambda_game_direct(const GameSpec& spec, double alpha, double beta);

double hat_lambda(const GameSpec& spec, double alpha);
/// lambda(alpha, beta) / W(beta - alpha)
double hat_lambda(const GameSpec& spec, double alpha, double beta);
double hat_lambda_inf(const GameSpec& spec, double alpha);

AlphaBounds alpha_bounds(const GameSpec& spec);

GameSolution solve(const GameSpec& spec, GameOptions opt = {});

/// Equilibrium value in the transformed form (payoffs g_S, g_I). Cases 2-4 are
/// the limits of the threshold formula and are not verified.
double value(const GameSolution& sol, double x);
double value_prime(const GameSolution& sol, double x);
double value_second(const GameSolution& sol, double x);
/// cds_value + value: the contract value seen by the sup player.
double contract_value(const GameSolution& sol, double x);

VerificationReport vi_check(const GameSolution& sol, const std::vector<double>& grid,
                            GameOptions opt = {});

/// Monte-Carlo saddle ordering v(x; theta*, tau_beta) <= v* <= v(x; theta_alpha, tau*)
/// for each deviation, within 3 pooled standard errors.
VerificationReport saddle_check(const GameSolution& sol, double x,
                                const std::vector<double>& alpha_devs,
                                const std::vector<double>& beta_devs, const SimConfig& cfg);

}  // namespace levyctl
