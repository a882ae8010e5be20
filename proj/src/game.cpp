#include "levyctl/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "levyctl/errors.hpp"
#include "levyctl/fluctuation.hpp"
#include "levyctl/mc_oracle.hpp"

namespace levyctl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool closed_form(const GameSpec& s) {
  return s.family.backend() == Backend::PartialFraction && s.family.model().is_hyperexponential();
}

double nu_density(const GameSpec& s, double x) { return s.family.model().jump_density(x); }

// Psi(x; nu_bar) = int_0^inf exp(-Phi y) nu_bar(x + y) dy
double psi_nu_bar(const GameSpec& s, double x) {
  const auto& fam = s.family;
  if (s.family.model().is_hyperexponential()) {
    double v = 0.0;
    for (const auto& j : fam.model().jumps())
      v += j.rate * std::exp(-j.decay * x) / (fam.phi() + j.decay);
    return v;
  }
  return fam.psi_integral(x, [&](double y) { return nu_bar(s, y); }, 0.0);
}

// e^{r L - eta alpha} - e^{-eta beta}, divided by (r + eta), without overflow
// or cancellation.
double exp_window(double r, double eta, double alpha, double beta) {
  const double L = beta - alpha;
  const double z = r + eta;
  if (std::abs(z * L) < 1.0) return std::exp(-eta * beta) * (z == 0.0 ? L : std::expm1(z * L) / z);
  return (std::exp(r * L - eta * alpha) - std::exp(-eta * beta)) / z;
}

// int_0^L r(y) nu_bar(beta - y) dy and int_0^L r(y) n(beta - y) dy, r the
// bounded resolvent remainder.
struct RemainderConv {
  double tail;
  double dens;
};

RemainderConv remainder_conv(const GameSpec& s, double alpha, double beta) {
  const auto& fam = s.family;
  const double L = beta - alpha;
  if (!(L > 0.0)) return {0.0, 0.0};
  if (closed_form(s)) {
    RemainderConv out{0.0, 0.0};
    const auto& terms = fam.terms();
    for (std::size_t k = 1; k < terms.size(); ++k) {
      for (const auto& j : fam.model().jumps()) {
        const double w = -terms[k].coeff * j.rate * exp_window(terms[k].root, j.decay, alpha, beta);
        out.tail += w;
        out.dens += w * j.decay;
      }
    }
    return out;
  }
  const double len = std::max(0.25, 2.0 / fam.remainder_decay());
  const double tail = integrate_chopped(
      [&](double y) { return fam.resolvent_remainder(y) * nu_bar(s, beta - y); }, 0.0, L, len);
  const double dens = integrate_chopped(
      [&](double y) { return fam.resolvent_remainder(y) * nu_density(s, beta - y); }, 0.0, L, len);
  return {tail, dens};
}

double psi_hat_lambda(const GameSpec& s, double alpha) {
  return -(s.p + s.family.q() * s.gamma_I) / s.family.phi() +
         (1.0 - s.gamma_I) * psi_nu_bar(s, alpha);
}

// Lambda and lambda with the exp(Phi L) growth isolated in one product. A
// given psi_alpha overrides Psi(alpha; hat lambda) (pinned at alphaunder).
struct LambdaPair {
  double Lambda;
  double lambda;
};

LambdaPair lambda_pair(const GameSpec& s, double alpha, double beta,
                       std::optional<double> psi_alpha = std::nullopt) {
  if (beta < alpha) throw ValidationError("Lambda requires alpha <= beta");
  const auto& fam = s.family;
  const double q = fam.q(), phi = fam.phi(), dpsi = fam.psi_prime_phi();
  const double L = beta - alpha;
  const double pa = psi_alpha ? *psi_alpha : psi_hat_lambda(s, alpha);
  const double grow = pa == 0.0 ? 0.0 : std::exp(phi * L) * pa / dpsi;
  const double a1 = 1.0 - s.gamma_I;
  const double pb = psi_nu_bar(s, beta);
  const auto rc = remainder_conv(s, alpha, beta);
  const double rL = fam.resolvent_remainder(L);
  const double c = s.p / q + s.gamma_I;
  const double Lam = s.p / q - s.gamma_S -
                     c * (1.0 - q / (phi * dpsi) - q * fam.resolvent_remainder_integral(L)) +
                     grow - a1 / dpsi * pb - a1 * rc.tail;
  const double lam = c * q * rL + phi * grow - a1 / dpsi * (phi * pb - nu_bar(s, beta)) -
                     a1 * (rL * nu_bar(s, alpha) - rc.dens);
  return {Lam, lam};
}

double clamp_root(double r) { return std::isfinite(r) ? std::max(r, 0.0) : (r > 0 ? kInf : 0.0); }

double cap_length(const GameSpec& s) { return 80.0 / s.family.phi(); }

InnerExtremum sup_Lambda(const GameSpec& s, double alpha, std::optional<double> psi_alpha) {
  auto r = inner_minimum([&](double b) { return -lambda_pair(s, alpha, b, psi_alpha).Lambda; },
                         [&](double b) { return -lambda_pair(s, alpha, b, psi_alpha).lambda; },
                         alpha, cap_length(s));
  r.value = -r.value;
  return r;
}

// sup over beta of Lambda(0, beta) / W(beta)
InnerExtremum sup_ratio_at_zero(const GameSpec& s) {
  const auto& fam = s.family;
  auto F = [&](double b) { return -lambda_pair(s, 0.0, b).Lambda / fam.W(b); };
  auto dF = [&](double b) {
    const auto lp = lambda_pair(s, 0.0, b);
    const double w = fam.W(b);
    return -(lp.lambda * w - lp.Lambda * fam.W_prime(b)) / (w * w);
  };
  const double lo = 1e-9 * cap_length(s);
  auto r = inner_minimum(F, dF, lo, cap_length(s));
  r.value = -r.value;
  return r;
}

}  // namespace

const char* to_string(GameCase c) {
  switch (c) {
    case GameCase::Interior: return "interior";
    case GameCase::BetaInfinite: return "beta_infinite";
    case GameCase::AlphaZero: return "alpha_zero";
    case GameCase::Degenerate: return "alpha_zero_beta_infinite";
  }
  return "?";
}

void validate(const GameSpec& s) {
  if (!(s.p > 0.0)) throw ValidationError("p must be > 0");
  if (!(s.gamma_S + s.gamma_I > 0.0)) throw ValidationError("gamma_S + gamma_I must be > 0");
  if (!(s.gamma_I >= 0.0 && s.gamma_I < 1.0))
    throw ValidationError("gamma_I must satisfy 0 <= gamma_I < 1");
  if (!std::isfinite(s.gamma_S)) throw ValidationError("gamma_S must be finite");
}

double zeta(const GameSpec& s, double x) { return ruin_laplace(s.family, x); }

Payoffs payoffs(const GameSpec& s, double x) {
  if (!(x > 0.0)) return {0.0, 0.0, 0.0};
  const double pq = s.p / s.family.q();
  const double base = -(pq + 1.0) * zeta(s, x);
  return {pq - s.gamma_S + base, pq + s.gamma_I + base, pq - s.gamma_S + s.gamma_I + base};
}

double cds_value(const GameSpec& s, double x) {
  const double pq = s.p / s.family.q();
  return (pq + 1.0) * zeta(s, x) - pq;
}

double nu_bar(const GameSpec& s, double x) { return s.family.model().tail_mass(x); }

double Lambda_game(const GameSpec& s, double alpha, double beta) {
  return lambda_pair(s, alpha, beta).Lambda;
}

double lambda_game(const GameSpec& s, double alpha, double beta) {
  return lambda_pair(s, alpha, beta).lambda;
}

double Lambda_game_direct(const GameSpec& s, double alpha, double beta) {
  if (beta < alpha) throw ValidationError("Lambda requires alpha <= beta");
  const auto& fam = s.family;
  const double q = fam.q();
  const double conv = fam.phi_integral(alpha, beta, [&](double t) { return nu_bar(s, t); });
  return s.p / q - s.gamma_S - (s.p / q + s.gamma_I) * fam.Z(beta - alpha) +
         (1.0 - s.gamma_I) * conv;
}

double lambda_game_direct(const GameSpec& s, double alpha, double beta) {
  if (beta < alpha) throw ValidationError("lambda requires alpha <= beta");
  const auto& fam = s.family;
  const double L = beta - alpha;
  const double conv = fam.phi_integral(alpha, beta, [&](double t) { return nu_density(s, t); });
  return -(s.p + fam.q() * s.gamma_I) * fam.W(L) +
         (1.0 - s.gamma_I) * (fam.W(L) * nu_bar(s, alpha) - conv);
}

double lambda_game_prime(const GameSpec& s, double alpha, double beta) {
  if (beta < alpha) throw ValidationError("lambda requires alpha <= beta");
  const auto& fam = s.family;
  const double L = beta - alpha;
  const double wp = fam.W_prime(L);
  const double conv =
      fam.phi_prime_integral(alpha, beta, [&](double t) { return nu_density(s, t); });
  return -(s.p + fam.q() * s.gamma_I) * wp +
         (1.0 - s.gamma_I) * (wp * nu_bar(s, alpha) - fam.W0() * nu_density(s, beta) - conv);
}

double hat_lambda(const GameSpec& s, double alpha) {
  return -(s.p + s.family.q() * s.gamma_I) + (1.0 - s.gamma_I) * nu_bar(s, alpha);
}

double hat_lambda(const GameSpec& s, double alpha, double beta) {
  if (!(beta > alpha)) return hat_lambda(s, alpha);
  return lambda_game(s, alpha, beta) / s.family.W(beta - alpha);
}

double hat_lambda_inf(const GameSpec& s, double alpha) {
  return s.family.phi() * psi_hat_lambda(s, alpha);
}

AlphaBounds alpha_bounds(const GameSpec& s) {
  validate(s);
  const double abar = increasing_crossing([&](double a) { return -hat_lambda(s, a); }, 0.0, kInf);
  const double aunder =
      increasing_crossing([&](double a) { return -psi_hat_lambda(s, a); }, 0.0, kInf);
  return {clamp_root(aunder), clamp_root(abar)};
}

GameSolution solve(const GameSpec& s, GameOptions opt) {
  validate(s);
  const auto ab = alpha_bounds(s);
  GameSolution sol{s, GameCase::Interior, 0.0, kInf, ab.alphaunder, ab.alphabar, 0.0, 0.0, 0.0, 0.0, {}};

  if (ab.alphaunder > 0.0) {
    // beta -> Lambda(alphaunder, beta) increases to p/q - gamma_S
    const double sup_under = s.p / s.family.q() - s.gamma_S;
    if (sup_under > 0.0) {
      // Search in w = log(-Psi(alpha; hat lambda)): near alphaunder the sup
      // moves like exp(Phi (beta* - alpha)) Psi(alpha), far beyond what a
      // root finder in alpha can resolve.
      const double psi_bar = psi_hat_lambda(s, ab.alphabar);
      if (!(psi_bar < 0.0)) throw SolverError("Psi(alphabar; hat lambda) is not negative");
      const double psi_under = psi_hat_lambda(s, ab.alphaunder);
      auto alpha_of = [&](double u) {
        if (psi_under - u <= 0.0) return ab.alphaunder;
        if (psi_bar - u >= 0.0) return ab.alphabar;
        return find_root([&](double a) { return psi_hat_lambda(s, a) - u; }, ab.alphaunder,
                         ab.alphabar, psi_under - u, psi_bar - u, 1e-15);
      };
      auto M = [&](double w) {
        const double u = -std::exp(w);
        return sup_Lambda(s, alpha_of(u), u).value;
      };
      const double w_hi = std::log(-psi_bar);
      const double m_hi = M(w_hi);
      if (!(m_hi < 0.0))
        throw SolverError("sup_beta Lambda(alphabar, beta) is not negative; cannot bracket alpha*");
      const double w_lo = w_hi - 300.0;
      const double m_lo = M(w_lo);
      if (!(m_lo > 0.0))
        throw SolverError("Lambda(alphaunder, beta) stays <= 0 up to the cap alpha + 80/Phi; beta* "
                          "lies beyond the search range");
      const double w_star = find_root(M, w_lo, w_hi, m_lo, m_hi, 1e-15);
      const double u_star = -std::exp(w_star);
      const double a_star = alpha_of(u_star);
      const InnerExtremum im = sup_Lambda(s, a_star, u_star);
      if (im.capped) throw SolverError("beta* reached the search cap 80/Phi");
      const auto lp = lambda_pair(s, a_star, im.arg, u_star);
      sol.kind = GameCase::Interior;
      sol.alpha_star = a_star;
      sol.beta_star = im.arg;
      sol.psi_alpha = u_star;
      sol.residual_Lambda = lp.Lambda;
      sol.residual_lambda = lp.lambda;
      sol.kappa = lp.Lambda / s.family.W(im.arg - a_star);
      if (std::abs(lp.Lambda) > opt.tol_fit || std::abs(lp.lambda) > opt.tol_fit)
        throw ConvergenceError("game fit conditions not met",
                               std::max(std::abs(lp.Lambda), std::abs(lp.lambda)));
      return sol;
    }
    sol.kind = GameCase::BetaInfinite;
    sol.alpha_star = ab.alphaunder;
    sol.psi_alpha = 0.0;
    sol.residual_Lambda = psi_hat_lambda(s, ab.alphaunder);
    sol.kappa = 0.0;
    return sol;
  }

  sol.alpha_star = 0.0;
  if (s.p / s.family.q() > s.gamma_S) {
    // Lambda(0, beta) / W(beta) exceeds its limit Psi(0; hat lambda) for large
    // beta and is -(gamma_S + gamma_I) / W(0) at 0, so the sup is interior
    const InnerExtremum r = sup_ratio_at_zero(s);
    if (r.capped) throw SolverError("beta* reached the search cap 80/Phi with alpha* = 0");
    sol.kind = GameCase::AlphaZero;
    sol.beta_star = r.arg;
    const auto lp = lambda_pair(s, 0.0, r.arg);
    sol.kappa = lp.Lambda / s.family.W(r.arg);
    sol.residual_lambda = lp.lambda - sol.kappa * s.family.W_prime(r.arg);
  } else {
    sol.kind = GameCase::Degenerate;
    sol.kappa = psi_hat_lambda(s, 0.0);
  }
  const auto& g = s.family.model().general();
  if (g && !g->finite_variation)
    sol.warnings.push_back(
        "alpha* = 0 with a jump part of unbounded variation: the threshold pair need not be an "
        "equilibrium");
  return sol;
}

namespace {

std::optional<double> pinned(const GameSolution& sol) {
  if (sol.alpha_star > 0.0) return sol.psi_alpha;
  return std::nullopt;
}

double gS_prime(const GameSpec& s, double x) {
  const auto& fam = s.family;
  const double q = fam.q();
  return -(s.p / q + 1.0) * (q * fam.W(x) - q / fam.phi() * fam.W_prime(x));
}

double gS_second(const GameSpec& s, double x) {
  const auto& fam = s.family;
  const double q = fam.q();
  return -(s.p / q + 1.0) * (q * fam.W_prime(x) - q / fam.phi() * fam.W_second(x));
}

}  // namespace

double value(const GameSolution& sol, double x) {
  const auto& s = sol.spec;
  if (!(x > 0.0)) return 0.0;
  const auto g = payoffs(s, x);
  if (x <= sol.alpha_star && sol.alpha_star > 0.0) return g.g_I;
  if (x >= sol.beta_star) return g.g_S;
  const double a = sol.alpha_star;
  return g.g_S + s.family.W(x - a) * sol.kappa - lambda_pair(s, a, x, pinned(sol)).Lambda;
}

double value_prime(const GameSolution& sol, double x) {
  const auto& s = sol.spec;
  if (!(x > 0.0)) return 0.0;
  const double gp = gS_prime(s, x);
  if ((x <= sol.alpha_star && sol.alpha_star > 0.0) || x >= sol.beta_star) return gp;
  const double a = sol.alpha_star;
  return gp + s.family.W_prime(x - a) * sol.kappa - lambda_pair(s, a, x, pinned(sol)).lambda;
}

double value_second(const GameSolution& sol, double x) {
  const auto& s = sol.spec;
  if (!(x > 0.0)) return 0.0;
  const double gpp = gS_second(s, x);
  if ((x <= sol.alpha_star && sol.alpha_star > 0.0) || x >= sol.beta_star) return gpp;
  const double a = sol.alpha_star;
  return gpp + s.family.W_second(x - a) * sol.kappa - lambda_game_prime(s, a, x);
}

double contract_value(const GameSolution& sol, double x) {
  return cds_value(sol.spec, x) + value(sol, x);
}

VerificationReport vi_check(const GameSolution& sol, const std::vector<double>& grid,
                            GameOptions opt) {
  if (sol.kind != GameCase::Interior)
    throw PreconditionError("vi_check requires an interior (case 1) solution");
  VerificationReport rep;
  const auto& s = sol.spec;
  const auto& fam = s.family;
  TestFunction tf{[&](double y) { return value(sol, y); },
                  [&](double y) { return value_prime(sol, y); },
                  [&](double y) { return value_second(sol, y); },
                  {0.0, sol.alpha_star, sol.beta_star}};
  const double tol = opt.tol_vi;
  for (double x : grid) {
    if (!(x > 0.0)) continue;
    const double v = value(sol, x);
    const auto g = payoffs(s, x);
    const char* region = x < sol.alpha_star   ? "inf_stops"
                         : x > sol.beta_star ? "sup_stops"
                                             : "continuation";
    rep.nonneg("above_g_S", region, x, v - g.g_S, tol);
    rep.nonneg("below_g_I", region, x, g.g_I - v, tol);
    if (x == sol.alpha_star || x == sol.beta_star) continue;
    const double gen = apply_generator(fam.model(), fam.q(), tf, x);
    if (x < sol.alpha_star) {
      rep.nonneg("generator", region, x, gen, tol);
      rep.equal("generator_hat_lambda", region, x, gen - hat_lambda(s, x), tol);
    } else if (x < sol.beta_star) {
      rep.equal("generator", region, x, gen, tol);
    } else {
      rep.nonneg("generator", region, x, -gen, tol);
    }
  }
  return rep;
}

VerificationReport saddle_check(const GameSolution& sol, double x,
                                const std::vector<double>& alpha_devs,
                                const std::vector<double>& beta_devs, const SimConfig& cfg) {
  if (sol.kind != GameCase::Interior)
    throw PreconditionError("saddle_check requires an interior (case 1) solution");
  VerificationReport rep;
  const auto& s = sol.spec;
  const auto star = mc::game_payoff(s, sol.alpha_star, sol.beta_star, x, cfg);
  for (double b : beta_devs) {
    // sup player deviates: must not gain
    const auto dev = mc::game_payoff(s, sol.alpha_star, b, x, cfg);
    const double pooled = std::hypot(dev.std_error, star.std_error);
    rep.nonneg("sup_deviation", "beta=" + std::to_string(b), x, star.mean - dev.mean, 3.0 * pooled);
  }
  for (double a : alpha_devs) {
    // inf player deviates: must not lower the value
    const auto dev = mc::game_payoff(s, a, sol.beta_star, x, cfg);
    const double pooled = std::hypot(dev.std_error, star.std_error);
    rep.nonneg("inf_deviation", "alpha=" + std::to_string(a), x, dev.mean - star.mean, 3.0 * pooled);
  }
  return rep;
}

}  // namespace levyctl
