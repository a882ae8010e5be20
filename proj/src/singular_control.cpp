#include "levyctl/singular_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levyctl/errors.hpp"

namespace levyctl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_real_line(const Interval& I) { return !std::isfinite(I.lo) && !std::isfinite(I.hi); }

bool is_dual_dividend(const SingularProblem& p) {
  return !std::isfinite(p.I.lo) && p.I.hi == 0.0 && p.f.is_zero() && p.C_U < 0.0;
}

bool is_sn_dividend(const SingularProblem& p) {
  return p.I.lo == 0.0 && !std::isfinite(p.I.hi) && p.f.is_zero() && p.C_D < 0.0;
}


SingularSolution solve_dividend_dual(const SingularProblem& p) {
  const auto& fam = p.family;
  const double target = -p.C_D / p.C_U;
  if (!(target > 1.0))
    throw ValidationError("dual dividend case needs -C_D / C_U > 1");
  auto g = [&](double y) { return fam.Z(y) - target; };
  double hi = 1.0;
  while (g(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e8) throw SolverError("cannot bracket Z^{-1}");
  }
  const double y = find_root(g, 0.0, hi, g(0.0), g(hi), 1e-16);
  SingularSolution s{p, SingularCase::DividendDual, -y, 0.0, -kInf, -y, 0.0, kNaN};
  s.residual_Lambda = Lambda(p, -y, 0.0);
  return s;
}

SingularSolution solve_dividend_sn(const SingularProblem& p) {
  const auto& fam = p.family;
  const double q = fam.q();
  auto g = [&](double b) {
    const double w = fam.W(b);
    return (p.C_D + p.C_U * fam.Z(b)) * fam.W_prime(b, Side::Left) / w - q * p.C_U * w;
  };
  const double L = 80.0 / fam.phi();
  constexpr int n = 800;
  double prev_b = L / n;
  double prev = g(prev_b);
  for (int i = 2; i <= n; ++i) {
    const double b = L * i / n;
    const double cur = g(b);
    if ((prev > 0.0) != (cur > 0.0)) {
      const double root = find_root(g, prev_b, b, prev, cur, 1e-15);
      SingularSolution s{p, SingularCase::DividendSN, 0.0, root, 0.0, 0.0, g(root), kNaN};
      return s;
    }
    prev_b = b;
    prev = cur;
  }
  throw SolverError("dividend barrier equation has no root on (0, 80/Phi]");
}

}  // namespace

const char* to_string(SingularCase c) {
  switch (c) {
    case SingularCase::Interior: return "interior";
    case SingularCase::BStarInfinite: return "b_star_infinite";
    case SingularCase::DividendDual: return "dividend_dual";
    case SingularCase::DividendSN: return "dividend_sn";
  }
  return "?";
}

void validate(const SingularProblem& p) {
  if (!(p.C_U + p.C_D > 0.0)) throw ValidationError("C_U + C_D must be > 0");
  if (!(p.I.lo < p.I.hi)) throw ValidationError("interval I must satisfy lo < hi");
  if (!std::isfinite(p.family.model().mean()))
    throw PreconditionError("singular control requires psi'(0+) > -inf");
  if (!p.f.is_continuous()) throw ValidationError("running cost f must be continuous");
}

PiecewisePolynomial f_tilde_prime_poly(const SingularProblem& p) {
  return p.f.derivative().plus(PiecewisePolynomial::constant(p.C_U * p.family.q()));
}

double f_tilde_prime(const SingularProblem& p, double x) {
  return p.f.derivative_at(x, 1) + p.C_U * p.family.q();
}

namespace {

// C_D + C_U + phi_a(b; f~') with W split into its exponential part and the
// bounded remainder, so the e^{Phi (b - a)} growth is carried exactly by
// Psi(a; f~'). psi_a is passed in so the caller can pin it at a root.
double Lambda_split(const SingularProblem& p, double a, double b, double psi_a) {
  if (b < a) throw ValidationError("Lambda requires a <= b");
  if (b == a) return p.C_D + p.C_U;
  const auto& fam = p.family;
  const auto ftp = f_tilde_prime_poly(p);
  const double grow = std::exp(fam.phi() * (b - a)) * psi_a;
  const double rint = integrate_chopped(
      [&](double y) { return fam.resolvent_remainder(b - y) * ftp(y); }, a, b,
      std::max(0.25, 2.0 / fam.remainder_decay()), ftp.breakpoints(), 1e-13);
  return p.C_D + p.C_U + (grow - fam.psi_integral(b, ftp)) / fam.psi_prime_phi() - rint;
}

}  // namespace

double Lambda(const SingularProblem& p, double a, double b) {
  return Lambda_split(p, a, b, p.family.psi_integral(a, f_tilde_prime_poly(p)));
}

double lambda_b(const SingularProblem& p, double a, double b) {
  if (b < a) throw ValidationError("lambda requires a <= b");
  const auto& fam = p.family;
  const auto ftp = f_tilde_prime_poly(p);
  // W' = Phi W + Theta
  const double theta_int = integrate_chopped(
      [&](double y) { return fam.Theta(b - y) * ftp(y); }, a, b,
      std::max(0.25, 2.0 / fam.remainder_decay()), ftp.breakpoints(), 1e-13);
  return fam.phi() * (Lambda(p, a, b) - p.C_D - p.C_U) + theta_int + ftp.left(b) * fam.W0();
}

ThresholdBounds threshold_bounds(const SingularProblem& p) {
  const auto ftp = f_tilde_prime_poly(p);
  return threshold_bounds(p.family, ftp, p.I);
}

ThresholdBounds threshold_bounds(const ScaleFamily& fam, const PiecewisePolynomial& ftp,
                                 Interval I) {
  const double abar = increasing_crossing([&ftp](double x) { return ftp(x); }, I.lo, I.hi);
  const double aunder =
      increasing_crossing([&](double x) { return fam.psi_integral(x, ftp); }, I.lo, I.hi);
  return {aunder, abar};
}

namespace {

// inf over b in (a, a + 80/Phi] of Lambda(a, b)
InnerExtremum inner_min(const SingularProblem& p, double a) {
  return inner_minimum([&](double b) { return Lambda(p, a, b); },
                       [&](double b) { return lambda_b(p, a, b); }, a, 80.0 / p.family.phi());
}

// At aunder Psi(a; f~') vanishes by definition; the computed value is only
// zero to rounding, which e^{80} would amplify.
InnerExtremum inner_min_at_root(const SingularProblem& p, double a) {
  const double phi = p.family.phi();
  auto lam = [&](double b) {
    const auto ftp = f_tilde_prime_poly(p);
    const auto& fam = p.family;
    const double theta_int = integrate_chopped(
        [&](double y) { return fam.Theta(b - y) * ftp(y); }, a, b,
        std::max(0.25, 2.0 / fam.remainder_decay()), ftp.breakpoints(), 1e-13);
    return phi * (Lambda_split(p, a, b, 0.0) - p.C_D - p.C_U) + theta_int + ftp.left(b) * fam.W0();
  };
  return inner_minimum([&](double b) { return Lambda_split(p, a, b, 0.0); }, lam, a, 80.0 / phi);
}

}  // namespace

SingularSolution solve(const SingularProblem& p, SingularOptions opt) {
  validate(p);
  if (is_dual_dividend(p)) return solve_dividend_dual(p);
  if (is_sn_dividend(p)) return solve_dividend_sn(p);
  if (!is_real_line(p.I))
    throw ValidationError(
        "bounded intervals are supported only for the two dividend configurations (f = 0)");
  if (!p.f.is_convex()) throw ValidationError("running cost f must be convex");

  const auto tb = threshold_bounds(p);
  if (!std::isfinite(tb.abar) || !std::isfinite(tb.aunder))
    throw PreconditionError("f~' has no sign change on I; no interior solution exists");

  const InnerExtremum at_under = inner_min_at_root(p, tb.aunder);
  if (at_under.value > 0.0) {
    SingularSolution s{p, SingularCase::BStarInfinite, tb.aunder, kInf, tb.aunder, tb.abar,
                       p.family.psi_integral(tb.aunder, f_tilde_prime_poly(p)), kNaN};
    return s;
  }
  auto m = [&](double a) { return inner_min(p, a).value; };
  const double m_hi = m(tb.abar);
  const double a_star = find_root(m, tb.aunder, tb.abar, at_under.value, m_hi, 1e-15);
  const InnerExtremum im = inner_min(p, a_star);
  SingularSolution s{p,       SingularCase::Interior, a_star,   im.arg,
                     tb.aunder, tb.abar,              Lambda(p, a_star, im.arg),
                     lambda_b(p, a_star, im.arg)};
  if (std::abs(s.residual_Lambda) > opt.tol_fit || std::abs(s.residual_lambda) > opt.tol_fit)
    throw ConvergenceError("singular fit conditions not met",
                           std::max(std::abs(s.residual_Lambda), std::abs(s.residual_lambda)));
  return s;
}

namespace {

double kappa(const SingularProblem& p, double a, double b) {
  if (!std::isfinite(b)) return p.family.psi_integral(a, f_tilde_prime_poly(p));
  return Lambda(p, a, b) / p.family.W(b - a);
}

}  // namespace

double value_ab(const SingularProblem& p, double a, double b, double x) {
  if (!(a < b)) throw ValidationError("value_ab requires a < b");
  if (x > b) return value_ab(p, a, b, b) + p.C_D * (x - b);
  const auto& fam = p.family;
  const double k = kappa(p, a, b);
  return fam.Z(x - a) / fam.q() * (k + p.f(a)) - p.C_U * fam.R(x - a) -
         fam.phi_integral(a, x, p.f);
}

double value_ab_prime(const SingularProblem& p, double a, double b, double x) {
  if (x > b) return p.C_D;
  if (x < a) return -p.C_U;
  return kappa(p, a, b) * p.family.W(x - a) - p.C_U -
         p.family.phi_integral(a, x, f_tilde_prime_poly(p));
}

double value_ab_second(const SingularProblem& p, double a, double b, double x) {
  if (x > b || x < a) return 0.0;
  const auto& fam = p.family;
  const auto ftp = f_tilde_prime_poly(p);
  const double conv =
      fam.phi_prime_integral(a, x, [&ftp](double y) { return ftp(y); }, ftp.breakpoints());
  return kappa(p, a, b) * fam.W_prime(x - a) - conv - ftp(x) * fam.W0();
}

double value(const SingularSolution& s, double x) {
  return value_ab(s.problem, s.a_star, s.b_star, x);
}

double value_prime(const SingularSolution& s, double x) {
  return value_ab_prime(s.problem, s.a_star, s.b_star, x);
}

double value_second(const SingularSolution& s, double x) {
  return value_ab_second(s.problem, s.a_star, s.b_star, x);
}

VerificationReport vi_check(const SingularSolution& s, const std::vector<double>& grid,
                            SingularOptions opt) {
  VerificationReport rep;
  const auto& p = s.problem;
  const auto& fam = p.family;
  std::vector<double> kinks{s.a_star};
  if (std::isfinite(s.b_star)) kinks.push_back(s.b_star);
  for (double k : p.f.breakpoints()) kinks.push_back(k);
  TestFunction tf{[&](double y) { return value(s, y); }, [&](double y) { return value_prime(s, y); },
                  [&](double y) { return value_second(s, y); }, kinks};
  const double tol = opt.tol_vi;
  for (double x : grid) {
    const bool inside = x > p.I.lo && x < p.I.hi;
    std::string region = x < s.a_star ? "below_a" : (x > s.b_star ? "above_b" : "waiting");
    if (!inside) {
      rep.add("generator", region, x, 0.0, tol, CheckStatus::Skip);
      continue;
    }
    if (s.kind == SingularCase::DividendSN && region == "above_b") {
      rep.add("generator", region, x, 0.0, tol, CheckStatus::Skip);
      continue;
    }
    const double gen = apply_generator(fam.model(), fam.q(), tf, x) + p.f(x);
    if (region == "waiting")
      rep.equal("generator", region, x, gen, tol);
    else
      rep.nonneg("generator", region, x, gen, tol);
    const double vp = value_prime(s, x);
    rep.nonneg("gradient_up", region, x, vp + p.C_U, tol);
    rep.nonneg("gradient_down", region, x, p.C_D - vp, tol);
  }
  return rep;
}

}  // namespace levyctl
