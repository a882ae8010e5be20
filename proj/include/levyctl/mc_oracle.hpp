#pragma once

#include <random>

#include "levyctl/game.hpp"
#include "levyctl/levy_model.hpp"
#include "levyctl/piecewise_polynomial.hpp"
#include "levyctl/sim_config.hpp"

namespace levyctl::mc {

/// Per-path random source: a Mersenne Twister seeded from (seed, path index).
/// The mirror flag negates every Gaussian draw (antithetic partner).
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t index, bool mirror = false);
  double normal();
  double exponential();  // rate 1
  double uniform();
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  bool mirror_;
};

/// One increment of X over dt, exact in law for Brownian motion plus
/// hyperexponential compound Poisson jumps.
double simulate_increment(const LevyModel& model, double dt, PathRng& rng);

/// Expected discounted payoffs, estimated with an independent exp(q) killing
/// clock in place of discounting. Jump times are simulated exactly. Killing and
/// reflecting barriers of the fluctuation estimators below are resolved inside
/// each step from the Brownian bridge (touch probability, or the extremum for
/// the Skorokhod push), so steps only have to keep the far barrier out of reach.
/// npv_sS and game_payoff check thresholds at step ends, with steps shrinking
/// to dt near them.
McEstimate exit_up(const LevyModel& model, double q, double x, double b, const SimConfig& cfg);
McEstimate exit_down(const LevyModel& model, double q, double x, double b, const SimConfig& cfg);
McEstimate ruin_laplace(const LevyModel& model, double q, double x, const SimConfig& cfg);

struct ExitPair {
  McEstimate up;
  McEstimate down;
};
/// exit_up and exit_down from the same paths.
ExitPair exit_two_sided(const LevyModel& model, double q, double x, double b,
                        const SimConfig& cfg);

McEstimate npv_doubly_reflected(const LevyModel& model, double q, double a, double b,
                                const PiecewisePolynomial& f, double C_U, double C_D, double x,
                                const SimConfig& cfg);
struct ReflectedControls {
  McEstimate upper;  // discounted push-down at b
  McEstimate lower;  // discounted push-up at a
};
/// Both control NPVs of the doubly reflected process from the same paths.
ReflectedControls doubly_reflected_controls(const LevyModel& model, double q, double a, double b,
                                            double x, const SimConfig& cfg);
/// Injection needed to keep X above a until it first exceeds b.
McEstimate injection_reflected_lower(const LevyModel& model, double q, double a, double b,
                                     double x, const SimConfig& cfg);

struct SSResult {
  McEstimate npv;
  /// Mean number of interventions before the killing time.
  McEstimate interventions;
};
SSResult npv_sS(const LevyModel& model, double q, double s, double S, const PiecewisePolynomial& f,
                double C_U, double K, double x, const SimConfig& cfg);

enum class GamePayoffForm {
  Contract,     // premium leg, default payment and cancellation fees
  Transformed,  // g_I / g_S at the stopping time, 0 at default
};
/// Inf player stops below alpha, sup player above beta (beta may be +inf).
McEstimate game_payoff(const GameSpec& spec, double alpha, double beta, double x,
                       const SimConfig& cfg, GamePayoffForm form = GamePayoffForm::Contract);

/// 2 sqrt(dt) * scale: the allowance added to 3 standard errors when comparing
/// a barrier-monitored estimate with its exact value.
double dt_allowance(double dt, double scale);

}  // namespace levyctl::mc
