#include "levyctl/impulse_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "levyctl/errors.hpp"
#include "levyctl/fluctuation.hpp"

namespace levyctl {

void validate(const ImpulseProblem& p) {
  if (!(p.K > 0.0)) throw ValidationError("K must be > 0");
  if (!std::isfinite(p.C_U)) throw ValidationError("C_U must be finite");
  if (!std::isfinite(p.family.model().mean()))
    throw PreconditionError("impulse control requires psi'(0+) > -inf");
  if (!p.f.is_continuous()) throw ValidationError("running cost f must be continuous");
  if (!p.f.is_convex()) throw ValidationError("running cost f must be convex");
}

PiecewisePolynomial f_tilde_poly(const ImpulseProblem& p) {
  return p.f.plus_linear(p.C_U * p.family.q());
}

PiecewisePolynomial f_tilde_prime_poly(const ImpulseProblem& p) {
  return p.f.derivative().plus(PiecewisePolynomial::constant(p.C_U * p.family.q()));
}

double Lambda_impulse_direct(const ImpulseProblem& p, double s, double S) {
  if (S < s) throw ValidationError("Lambda requires s <= S");
  const auto& fam = p.family;
  const auto ft = f_tilde_poly(p);
  return fam.phi() * fam.psi_integral(s, ft) * fam.Wbar(S - s) + p.K -
         fam.phi_integral(s, S, ft);
}

double Lambda_impulse(const ImpulseProblem& p, double s, double S) {
  if (S < s) throw ValidationError("Lambda requires s <= S");
  const auto& fam = p.family;
  const auto ftp = f_tilde_prime_poly(p);
  auto integrand = [&](double y) { return fam.psi_integral(y, ftp) * fam.Thetabar(S - y); };
  return integrate_chopped(integrand, s, S, std::max(0.25, 2.0 / fam.phi()), ftp.breakpoints(),
                           1e-13) +
         p.K;
}

double lambda_impulse(const ImpulseProblem& p, double s, double S) {
  if (S < s) throw ValidationError("lambda requires s <= S");
  const auto& fam = p.family;
  const auto ftp = f_tilde_prime_poly(p);
  auto integrand = [&](double y) { return fam.psi_integral(y, ftp) * fam.Theta(S - y); };
  return fam.psi_integral(S, ftp) * fam.W0() +
         integrate_chopped(integrand, s, S, std::max(0.25, 2.0 / fam.phi()), ftp.breakpoints(),
                           1e-13);
}

ThresholdBounds threshold_bounds(const ImpulseProblem& p) {
  return threshold_bounds(p.family, f_tilde_prime_poly(p), Interval{});
}

namespace {

InnerExtremum inner_min(const ImpulseProblem& p, double s) {
  return inner_minimum([&](double S) { return Lambda_impulse(p, s, S); },
                       [&](double S) { return lambda_impulse(p, s, S); }, s,
                       80.0 / p.family.phi());
}

}  // namespace

ImpulseSolution solve(const ImpulseProblem& p, ImpulseOptions opt) {
  validate(p);
  const auto tb = threshold_bounds(p);
  if (!std::isfinite(tb.abar) || !std::isfinite(tb.aunder))
    throw PreconditionError("f~' has no sign change; no (s, S) solution exists");

  auto m = [&](double s) { return inner_min(p, s).value; };
  const double s_hi = tb.aunder;
  const double m_hi = m(s_hi);
  double step = 1.0 / p.family.phi();
  double s_lo = s_hi - step;
  double m_lo = m(s_lo);
  while (m_lo >= 0.0) {
    step *= 2.0;
    s_lo = s_hi - step;
    if (step > 1e6) throw SolverError("cannot bracket s*: inf_S Lambda(s, S) stays positive");
    m_lo = m(s_lo);
  }
  const double s_star = find_root(m, s_lo, s_hi, m_lo, m_hi, 1e-15);
  const InnerExtremum im = inner_min(p, s_star);
  ImpulseSolution sol{p,        s_star,  im.arg, tb.aunder, tb.abar, Lambda_impulse(p, s_star, im.arg),
                      lambda_impulse(p, s_star, im.arg)};
  if (!(sol.S_star > tb.aunder))
    throw SolverError("impulse solution violates S* > aunder");
  if (std::abs(sol.residual_Lambda) > opt.tol_fit || std::abs(sol.residual_lambda) > opt.tol_fit)
    throw ConvergenceError("impulse fit conditions not met",
                           std::max(std::abs(sol.residual_Lambda), std::abs(sol.residual_lambda)));
  return sol;
}

namespace {

double coefficient(const ImpulseSolution& s) {
  const auto& fam = s.problem.family;
  return fam.phi() / fam.q() * fam.psi_integral(s.s_star, s.problem.f) + s.problem.C_U / fam.phi();
}

double continuation_value(const ImpulseSolution& s, double x) {
  const auto& p = s.problem;
  const auto& fam = p.family;
  const double y = x - s.s_star;
  return coefficient(s) * fam.Z(y) - p.C_U * fam.R(y) - fam.phi_integral(s.s_star, x, p.f);
}

}  // namespace

double value(const ImpulseSolution& s, double x) {
  if (x < s.s_star)
    return s.problem.K + continuation_value(s, s.S_star) + s.problem.C_U * (s.S_star - x);
  return continuation_value(s, x);
}

double value_tilde(const ImpulseSolution& s, double x) { return value(s, x) + s.problem.C_U * x; }

double value_prime(const ImpulseSolution& s, double x) {
  const auto& p = s.problem;
  if (x < s.s_star) return -p.C_U;
  const auto& fam = p.family;
  const double y = x - s.s_star;
  const auto fp = p.f.derivative();
  return coefficient(s) * fam.q() * fam.W(y) - p.C_U * fam.Z(y) - p.f(s.s_star) * fam.W(y) -
         fam.phi_integral(s.s_star, x, fp);
}

double value_second(const ImpulseSolution& s, double x) {
  const auto& p = s.problem;
  if (x < s.s_star) return 0.0;
  const auto& fam = p.family;
  const double y = x - s.s_star;
  const auto fp = p.f.derivative();
  const double conv =
      fam.phi_prime_integral(s.s_star, x, [&fp](double u) { return fp(u); }, fp.breakpoints());
  return (coefficient(s) * fam.q() - p.f(s.s_star)) * fam.W_prime(y) - p.C_U * fam.q() * fam.W(y) -
         conv - fam.W0() * fp(x);
}

std::vector<double> intervention_obstacle(const ImpulseSolution& s, const std::vector<double>& xs) {
  const auto& p = s.problem;
  if (xs.empty()) return {};
  const double lo = std::min(*std::min_element(xs.begin(), xs.end()), s.s_star);
  // vtilde is convex with its minimum at S*; far to the right the
  // Z/R/phi combination cancels catastrophically, so stop a few 1/Phi past.
  const double hi = std::max(*std::max_element(xs.begin(), xs.end()), s.S_star) +
                    5.0 / p.family.phi();
  constexpr int n = 2001;
  const auto grid = linspace(lo, hi, n);
  std::vector<double> vt(n);
  for (int i = 0; i < n; ++i) vt[i] = value_tilde(s, grid[i]);

  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    double best = value_tilde(s, x);
    int best_i = -1;
    for (int i = 0; i < n; ++i) {
      if (grid[i] < x) continue;
      if (vt[i] < best) {
        best = vt[i];
        best_i = i;
      }
    }
    if (best_i >= 0) {
      const double a = std::max(x, grid[std::max(0, best_i - 1)]);
      const double b = grid[std::min(n - 1, best_i + 1)];
      std::uintmax_t iters = 200;
      auto r = boost::math::tools::brent_find_minima([&](double y) { return value_tilde(s, y); },
                                                     a, b, 52, iters);
      if (r.second < best) {
        best = r.second;
      }
    }
    out.push_back(p.K + best - p.C_U * x);
  }
  return out;
}

VerificationReport qvi_check(const ImpulseSolution& s, const std::vector<double>& grid,
                             ImpulseOptions opt) {
  VerificationReport rep;
  const auto& p = s.problem;
  const auto& fam = p.family;
  std::vector<double> kinks{s.s_star};
  for (double k : p.f.breakpoints()) kinks.push_back(k);
  TestFunction tf{[&](double y) { return value(s, y); }, [&](double y) { return value_prime(s, y); },
                  [&](double y) { return value_second(s, y); }, kinks};
  const double tol = opt.tol_vi;
  const auto obstacle = intervention_obstacle(s, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    const bool below = x < s.s_star;
    const std::string region = below ? "below_s" : "continuation";
    const double gen = apply_generator(fam.model(), fam.q(), tf, x) + p.f(x);
    if (below)
      rep.nonneg("generator", region, x, gen, tol);
    else
      rep.equal("generator", region, x, gen, tol);
    const double gap = obstacle[i] - value(s, x);
    // above aunder the sufficiency argument is nonstandard: numerical misses are warnings
    const CheckStatus miss = x > s.aunder ? CheckStatus::Warn : CheckStatus::Fail;
    if (below)
      rep.equal("obstacle", region, x, gap, tol, miss);
    else
      rep.nonneg("obstacle", region, x, gap, tol, miss);
  }
  return rep;
}

}  // namespace levyctl
