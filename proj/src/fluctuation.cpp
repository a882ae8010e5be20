#include "levyctl/fluctuation.hpp"

#include <algorithm>
#include <cmath>

#include "levyctl/errors.hpp"

namespace levyctl {

namespace {

void require_order(double a, double b) {
  if (!(a < b)) throw ValidationError("barriers must satisfy a < b");
}

double phi_of(const ScaleFamily& fam, double s, double x, const Integrand& h) {
  return fam.phi_integral(s, x, h.h, h.breaks);
}

// int_a^b h(y) W'(b - y) dy + W(0) h(b)
double upper_boundary_term(const ScaleFamily& fam, double a, double b, const Integrand& h) {
  return fam.phi_prime_integral(a, b, h.h, h.breaks) + fam.W0() * h.h(b);
}

const Integrand& need(const Integrand* h) {
  if (!h || !h->h) throw ValidationError("resolvent kind needs an integrand");
  return *h;
}

}  // namespace

double exit_up(const ScaleFamily& fam, double x, double b) {
  if (!(b > 0.0)) throw ValidationError("exit_up requires b > 0");
  if (x > b) throw ValidationError("exit_up requires x <= b");
  return fam.W(x) / fam.W(b);
}

double exit_down(const ScaleFamily& fam, double x, double b) {
  if (!(b > 0.0)) throw ValidationError("exit_down requires b > 0");
  if (x > b) throw ValidationError("exit_down requires x <= b");
  return fam.Z(x) - fam.Z(b) * fam.W(x) / fam.W(b);
}

double ruin_laplace(const ScaleFamily& fam, double x) {
  if (x <= 0.0) return 1.0;
  const double q = fam.q(), phi = fam.phi();
  if (phi * x < 2.0) return fam.Z(x) - q / phi * fam.W(x);
  // the exp(Phi x) parts of Z and (q/Phi) W cancel exactly
  return 1.0 - q / (phi * fam.psi_prime_phi()) - q * fam.resolvent_remainder_integral(x) +
         q / phi * fam.resolvent_remainder(x);
}

double resolvent(const ScaleFamily& fam, double x, Corridor r, const Integrand& h) {
  require_order(r.a, r.b);
  if (x > r.b) throw ValidationError("corridor resolvent requires x <= b");
  if (x < r.a) return 0.0;
  return fam.W(x - r.a) / fam.W(r.b - r.a) * phi_of(fam, r.a, r.b, h) -
         phi_of(fam, r.a, x, h);
}

double resolvent(const ScaleFamily& fam, double x, AboveKilled r, const Integrand& h) {
  if (x < r.a) return 0.0;
  return fam.psi_integral(r.a, h.h, h.growth, h.breaks) * fam.W(x - r.a) -
         phi_of(fam, r.a, x, h);
}

double resolvent(const ScaleFamily& fam, double x, Whole, const Integrand& h) {
  const double up = fam.psi_integral(x, h.h, h.growth, h.breaks) / fam.psi_prime_phi();
  const double decay = fam.remainder_decay();
  if (!(h.growth < decay))
    throw PreconditionError("whole-line resolvent diverges: growth bound >= remainder decay");
  const double rate = decay - h.growth;
  std::vector<double> shifted;
  for (double k : h.breaks)
    if (k < x) shifted.push_back(x - k);
  auto integrand = [&](double z) { return fam.resolvent_remainder(z) * h.h(x - z); };
  const double down = integrate_chopped(integrand, 0.0, 40.0 / rate, 2.0 / rate, shifted, 1e-12);
  return up + down;
}

InfResolvent inf_resolvent_density(const ScaleFamily& fam, double y) {
  if (y < 0.0) throw ValidationError("inf_resolvent_density requires y >= 0");
  return {fam.Theta(y) / fam.phi(), fam.W0() / fam.phi()};
}

double reflected_upper(const ScaleFamily& fam, double a, double b, UpperKind kind, double x,
                       const Integrand* h) {
  require_order(a, b);
  const double xe = std::min(x, b);
  const double wx = fam.W(xe - a);
  const double wpb = fam.W_prime(b - a);
  switch (kind) {
    case UpperKind::ExitLaplace:
      return fam.Z(xe - a) - fam.q() * fam.W(b - a) * wx / wpb;
    case UpperKind::Resolvent: {
      const auto& hh = need(h);
      if (xe < a) return 0.0;
      return wx / wpb * upper_boundary_term(fam, a, b, hh) - phi_of(fam, a, xe, hh);
    }
    case UpperKind::DividendNPV:
      return wx / wpb + (x - xe);
  }
  return 0.0;
}

double reflected_lower(const ScaleFamily& fam, double a, double b, LowerKind kind, double x,
                       const Integrand* h) {
  require_order(a, b);
  if (x > b) throw ValidationError("reflected_lower requires x <= b");
  const double zx = fam.Z(x - a);
  const double zb = fam.Z(b - a);
  switch (kind) {
    case LowerKind::ExitLaplace:
      return zx / zb;
    case LowerKind::Resolvent: {
      const auto& hh = need(h);
      return zx / zb * phi_of(fam, a, b, hh) - phi_of(fam, a, x, hh);
    }
    case LowerKind::InjectionNPV:
      return -fam.R(x - a) + zx * fam.R(b - a) / zb;
  }
  return 0.0;
}

double doubly_reflected(const ScaleFamily& fam, double a, double b, DoubleKind kind, double x,
                        const Integrand* h) {
  require_order(a, b);
  const double xe = std::min(x, b);
  const double q = fam.q();
  const double zx = fam.Z(xe - a);
  const double qw = q * fam.W(b - a);
  switch (kind) {
    case DoubleKind::UpperControlNPV:
      return zx / qw + (x - xe);
    case DoubleKind::LowerControlNPV:
      return -fam.R(xe - a) + fam.Z(b - a) * zx / qw;
    case DoubleKind::Resolvent: {
      const auto& hh = need(h);
      return zx / qw * upper_boundary_term(fam, a, b, hh) - phi_of(fam, a, xe, hh);
    }
  }
  return 0.0;
}

namespace {

struct Derivs {
  double d1, d2;
};

// Five-point stencils; one-sided on the side of x away from a nearby kink.
Derivs finite_diff(const RealFn& f, double x, double h, const std::vector<double>& kinks) {
  double dir = 0.0;
  for (double k : kinks) {
    if (std::abs(x - k) <= 2.0 * h) {
      dir = x >= k ? 1.0 : -1.0;
      break;
    }
  }
  if (dir == 0.0) {
    const double fm2 = f(x - 2 * h), fm1 = f(x - h), f0 = f(x), fp1 = f(x + h), fp2 = f(x + 2 * h);
    return {(fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h),
            (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)};
  }
  const double s = dir * h;
  const double f0 = f(x), f1 = f(x + s), f2 = f(x + 2 * s), f3 = f(x + 3 * s), f4 = f(x + 4 * s);
  return {(-25 * f0 + 48 * f1 - 36 * f2 + 16 * f3 - 3 * f4) / (12 * s),
          (35 * f0 - 104 * f1 + 114 * f2 - 56 * f3 + 11 * f4) / (12 * h * h)};
}

}  // namespace

double apply_generator(const LevyModel& model, double q, const TestFunction& v, double x,
                       GeneratorOptions opt) {
  if (!v.value) throw ValidationError("test function has no value");
  const double h = opt.fd_step * std::max(1.0, std::abs(x));
  const double v0 = v.value(x);
  double d1, d2;
  if (v.first && v.second) {
    d1 = v.first(x);
    d2 = v.second(x);
  } else {
    const Derivs fd = finite_diff(v.value, x, h, v.kinks);
    d1 = v.first ? v.first(x) : fd.d1;
    d2 = v.second ? v.second(x) : fd.d2;
  }

  const double sig = model.sigma();
  double out = model.linear_coefficient() * d1 - q * v0;
  if (sig > 0.0) out += 0.5 * sig * sig * d2;

  double min_kink = x;
  std::vector<double> u_breaks;
  for (double k : v.kinks) {
    if (k < x) {
      u_breaks.push_back(x - k);
      min_kink = std::min(min_kink, k);
    }
  }
  auto shifted = [&](double u) { return v.value(x - u); };
  for (const auto& j : model.jumps()) {
    const double upper = (x - min_kink) + 50.0 / j.decay;
    auto integrand = [&](double u) { return j.decay * std::exp(-j.decay * u) * shifted(u); };
    const double integral =
        integrate_chopped(integrand, 0.0, upper, 2.0 / j.decay, u_breaks, 1e-13);
    out += j.rate * (integral - v0);
  }

  if (const auto& g = model.general()) {
    const double eps = std::min(1e-3, 0.5 * h);
    // second-order Taylor near u = 0 keeps the compensated integrand finite
    const double near =
        integrate([&](double u) { return 0.5 * d2 * u * u * g->density(u); }, 0.0, eps, {}, 1e-14);
    auto integrand = [&](double u) {
      const double comp = u < 1.0 ? d1 * u : 0.0;
      return (shifted(u) - v0 + comp) * g->density(u);
    };
    std::vector<double> br = u_breaks;
    br.push_back(1.0);
    const double far =
        integrate_chopped(integrand, eps, std::max(eps, g->support_bound), 0.5, br, 1e-12);
    out += near + far;
  }
  return out;
}

VerificationReport martingale_check(const ScaleFamily& fam, double a, const std::vector<double>& grid,
                                    double tol) {
  VerificationReport rep;
  const auto& m = fam.model();
  const bool has_R = std::isfinite(m.mean());
  auto one = [&](const char* name, const RealFn& f, double x) {
    const TestFunction v{[&](double y) { return f(y - a); }, {}, {}, {a}};
    const double r = apply_generator(m, fam.q(), v, x) / std::max(1.0, std::abs(f(x - a)));
    rep.equal(name, "x>a", x, r, tol);
  };
  for (double x : grid) {
    if (!(x > a)) continue;
    one("generator_Z", [&](double y) { return fam.Z(y); }, x);
    if (has_R) one("generator_R", [&](double y) { return fam.R(y); }, x);
    one("generator_W", [&](double y) { return fam.W(y); }, x);
  }
  return rep;
}

}  // namespace levyctl
