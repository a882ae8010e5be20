#pragma once

#include <limits>
#include <vector>

#include "levyctl/fluctuation.hpp"
#include "levyctl/piecewise_polynomial.hpp"
#include "levyctl/scale_function.hpp"
#include "levyctl/verification.hpp"

namespace levyctl {

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

/// Keep the state in I by pushing up (unit cost C_U) and down (unit cost C_D)
/// while paying running cost f.
struct SingularProblem {
  ScaleFamily family;
  PiecewisePolynomial f;
  double C_U;
  double C_D;
  Interval I;
};

enum class SingularCase { Interior, BStarInfinite, DividendDual, DividendSN };
const char* to_string(SingularCase c);

struct ThresholdBounds {
  double aunder;
  double abar;
};

struct SingularOptions {
  double tol_fit = 1e-8;
  double tol_vi = 1e-5;
};

struct SingularSolution {
  SingularProblem problem;
  SingularCase kind;
  double a_star;
  double b_star;  // +inf for BStarInfinite
  double aunder;
  double abar;
  double residual_Lambda;
  double residual_lambda;
};

void validate(const SingularProblem& prob);

/// f'(x+) + C_U q
double f_tilde_prime(const SingularProblem& prob, double x);
PiecewisePolynomial f_tilde_prime_poly(const SingularProblem& prob);

double Lambda(const SingularProblem& prob, double a, double b);
/// d Lambda / d b
double lambda_b(const SingularProblem& prob, double a, double b);

ThresholdBounds threshold_bounds(const SingularProblem& prob);
/// (aunder, abar) for a given f~' on I.
ThresholdBounds threshold_bounds(const ScaleFamily& fam, const PiecewisePolynomial& ftp,
                                 Interval I);

SingularSolution solve(const SingularProblem& prob, SingularOptions opt = {});

/// NPV of the doubly reflected strategy on [a, b] (b may be +inf), any x.
double value_ab(const SingularProblem& prob, double a, double b, double x);
double value_ab_prime(const SingularProblem& prob, double a, double b, double x);
double value_ab_second(const SingularProblem& prob, double a, double b, double x);

double value(const SingularSolution& sol, double x);
double value_prime(const SingularSolution& sol, double x);
double value_second(const SingularSolution& sol, double x);

VerificationReport vi_check(const SingularSolution& sol, const std::vector<double>& grid,
                            SingularOptions opt = {});

}  // namespace levyctl
