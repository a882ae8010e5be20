#pragma once

#include <vector>

#include "levyctl/scale_function.hpp"
#include "levyctl/verification.hpp"

namespace levyctl {

/// E_x[exp(-q T_b^+); T_b^+ < T_0^-]
double exit_up(const ScaleFamily& fam, double x, double b);
/// E_x[exp(-q T_0^-); T_0^- < T_b^+]
double exit_down(const ScaleFamily& fam, double x, double b);
/// zeta(x) = E_x[exp(-q T_0^-)]
double ruin_laplace(const ScaleFamily& fam, double x);

/// Discounted occupation integrals E_x[int exp(-qt) h(X_t) dt] up to a horizon.
struct Corridor {
  double a, b;
};
struct AboveKilled {
  double a;
};
struct Whole {};

/// h is described by a function, its breakpoints and (for unbounded regions)
/// an exponential growth rate.
struct Integrand {
  RealFn h;
  std::vector<double> breaks;
  double growth = 0.0;
};

double resolvent(const ScaleFamily& fam, double x, Corridor region, const Integrand& h);
double resolvent(const ScaleFamily& fam, double x, AboveKilled region, const Integrand& h);
double resolvent(const ScaleFamily& fam, double x, Whole region, const Integrand& h);

struct InfResolvent {
  double density;
  double atom_at_0;
};
/// Discounted occupation of the running infimum depth -inf X at y >= 0.
InfResolvent inf_resolvent_density(const ScaleFamily& fam, double y);

enum class UpperKind { ExitLaplace, Resolvent, DividendNPV };
enum class LowerKind { ExitLaplace, Resolvent, InjectionNPV };
enum class DoubleKind { UpperControlNPV, LowerControlNPV, Resolvent };

/// Process reflected from above at b, killed at the first down-crossing of a.
double reflected_upper(const ScaleFamily& fam, double a, double b, UpperKind kind, double x,
                       const Integrand* h = nullptr);
/// Process reflected from below at a, killed at the first up-crossing of b.
double reflected_lower(const ScaleFamily& fam, double a, double b, LowerKind kind, double x,
                       const Integrand* h = nullptr);
/// Process reflected at both a and b, no killing.
double doubly_reflected(const ScaleFamily& fam, double a, double b, DoubleKind kind, double x,
                        const Integrand* h = nullptr);

/// A candidate function for (L - q)v. Missing derivatives are approximated by
/// five-point differences; kinks steer stencils and split the jump integral.
struct TestFunction {
  RealFn value;
  RealFn first;
  RealFn second;
  std::vector<double> kinks;
};

struct GeneratorOptions {
  double fd_step = 1e-4;
};

/// (L - q) v (x)
double apply_generator(const LevyModel& model, double q, const TestFunction& v, double x,
                       GeneratorOptions opt = {});

/// (L - q) of Z(. - a), R(. - a) and W(. - a) at grid points x > a, each
/// relative to max(1, |v(x)|). R is skipped for infinite-mean models.
VerificationReport martingale_check(const ScaleFamily& fam, double a, const std::vector<double>& grid,
                                    double tol = 1e-6);

}  // namespace levyctl
