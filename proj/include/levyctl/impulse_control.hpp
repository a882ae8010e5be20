#pragma once

#include <vector>

#include "levyctl/piecewise_polynomial.hpp"
#include "levyctl/scale_function.hpp"
#include "levyctl/singular_control.hpp"
#include "levyctl/verification.hpp"

namespace levyctl {

/// Push the state from below s up to S, paying C_U per unit plus K per push.
struct ImpulseProblem {
  ScaleFamily family;
  PiecewisePolynomial f;
  double C_U;
  double K;
};

struct ImpulseOptions {
  double tol_fit = 1e-8;
  double tol_vi = 1e-5;
};

struct ImpulseSolution {
  ImpulseProblem problem;
  double s_star;
  double S_star;
  double aunder;
  double abar;
  double residual_Lambda;
  double residual_lambda;
};

void validate(const ImpulseProblem& prob);

/// f + C_U q x and its derivative.
PiecewisePolynomial f_tilde_poly(const ImpulseProblem& prob);
PiecewisePolynomial f_tilde_prime_poly(const ImpulseProblem& prob);

/// Theta-bar convolution form; bounded kernel, used by the solver.
double Lambda_impulse(const ImpulseProblem& prob, double s, double S);
/// Same quantity through Psi(s; f~), W-bar and phi_s; loses digits once
/// S - s is many multiples of 1/Phi.
double Lambda_impulse_direct(const ImpulseProblem& prob, double s, double S);
/// d Lambda / d S
double lambda_impulse(const ImpulseProblem& prob, double s, double S);

ThresholdBounds threshold_bounds(const ImpulseProblem& prob);

ImpulseSolution solve(const ImpulseProblem& prob, ImpulseOptions opt = {});

double value(const ImpulseSolution& sol, double x);
double value_prime(const ImpulseSolution& sol, double x);
double value_second(const ImpulseSolution& sol, double x);
/// v(x) + C_U x
double value_tilde(const ImpulseSolution& sol, double x);

/// K + inf_{u >= 0} [C_U u + v(x + u)] for each x, by a 2001-point grid then
/// Brent refinement.
std::vector<double> intervention_obstacle(const ImpulseSolution& sol,
                                          const std::vector<double>& xs);

VerificationReport qvi_check(const ImpulseSolution& sol, const std::vector<double>& grid,
                             ImpulseOptions opt = {});

}  // namespace levyctl
