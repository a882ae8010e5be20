#include "levyctl/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "levyctl/errors.hpp"
#include "levyctl/numerics.hpp"

namespace levyctl {

namespace {

// int_0^1 u * decay * exp(-decay u) du
double small_jump_mean(const ExpJump& j) {
  const double e = j.decay;
  return (1.0 - std::exp(-e) * (1.0 + e)) / e;
}

double tanh_sinh_0(const std::function<double(double)>& f, double c = 1.0) {
  thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
  // Integrable densities may still overflow once u underflows; those nodes carry no mass.
  auto guarded = [&f](double u) {
    const double v = f(u);
    return !std::isfinite(v) && u < 1e-150 ? 0.0 : v;
  };
  return ts.integrate(guarded, 0.0, c, 1e-12);
}

double tanh_sinh_01(const std::function<double(double)>& f) { return tanh_sinh_0(f); }

// int_0^1 of an integrand built from exp(-s u): tanh-sinh where |s u| < 1,
// period-sized pieces while exp(-s u) still matters, coarse pieces after.
double small_jumps(const std::function<double(double)>& f, std::complex<double> s) {
  const double mod = std::abs(s);
  const double c0 = std::min(1.0, 1.0 / std::max(mod, 1e-300));
  double v = tanh_sinh_0(f, c0);
  if (c0 >= 1.0) return v;
  const double c1 = std::clamp(40.0 / std::max(s.real(), 1e-300), c0, 1.0);
  const double tol = 1e-13 * std::max(1.0, mod);
  if (c1 > c0) v += integrate_chopped(f, c0, c1, 2.0 / mod, {}, tol);
  if (c1 < 1.0) {
    std::vector<double> breaks;
    for (double u = 4.0 * c1; u < 1.0; u *= 4.0) breaks.push_back(u);
    v += integrate(f, c1, 1.0, breaks, tol);
  }
  return v;
}

}  // namespace

LevyModel LevyModel::with_gamma(double sigma, double gamma, std::vector<ExpJump> jumps,
                                std::optional<GeneralDensity> general) {
  LevyModel m;
  m.sigma_ = sigma;
  m.gamma_ = gamma;
  m.jumps_ = std::move(jumps);
  m.general_ = std::move(general);
  m.exp_drift_ = gamma;
  for (const auto& j : m.jumps_) m.exp_drift_ += j.rate * small_jump_mean(j);
  m.validate();
  return m;
}

LevyModel LevyModel::with_delta(double sigma, double delta, std::vector<ExpJump> jumps,
                                std::optional<GeneralDensity> general) {
  double gamma = delta;
  for (const auto& j : jumps) gamma -= j.rate * small_jump_mean(j);
  if (general) {
    if (!general->finite_variation)
      throw ValidationError("delta form requires finite-variation jumps");
    const auto& g = general->density;
    gamma -= tanh_sinh_01([&g](double u) { return u * g(u); });
  }
  return with_gamma(sigma, gamma, std::move(jumps), std::move(general));
}

void LevyModel::validate() const {
  if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) throw ValidationError("sigma must be >= 0");
  if (!std::isfinite(gamma_)) throw ValidationError("drift must be finite");
  for (std::size_t i = 0; i < jumps_.size(); ++i) {
    const auto& j = jumps_[i];
    if (!(j.rate > 0.0) || !std::isfinite(j.rate)) throw ValidationError("jump rate must be > 0");
    if (!(j.decay > 0.0) || !std::isfinite(j.decay))
      throw ValidationError("jump decay must be > 0");
    for (std::size_t k = 0; k < i; ++k)
      if (std::abs(jumps_[k].decay - j.decay) <= 1e-12 * std::max(1.0, j.decay))
        throw ValidationError("jump decays must be pairwise distinct");
  }
  if (general_) {
    if (!general_->density) throw ValidationError("general density function is empty");
    if (!general_->levy_integrable)
      throw ValidationError("general density must satisfy int min(1,u^2) nu(du) < inf");
    if (general_->finite_activity && !general_->finite_variation)
      throw ValidationError("finite activity implies finite variation");
  }
  if (sigma_ == 0.0 && variation() == Variation::Bounded && !(delta() > 0.0))
    throw ValidationError("bounded-variation model needs delta > 0 (negative subordinator)");
}

double LevyModel::delta() const {
  double d = exp_drift_;
  if (general_) {
    if (!general_->finite_variation) return std::numeric_limits<double>::quiet_NaN();
    const auto& g = general_->density;
    d += tanh_sinh_01([&g](double u) { return u * g(u); });
  }
  return d;
}

Variation LevyModel::variation() const {
  if (sigma_ > 0.0) return Variation::Unbounded;
  if (general_ && !general_->finite_variation) return Variation::Unbounded;
  return Variation::Bounded;
}

bool LevyModel::finite_activity() const { return !general_ || general_->finite_activity; }

bool LevyModel::finite_mean() const { return !general_ || general_->finite_mean; }

double LevyModel::jump_mass() const {
  double m = 0.0;
  for (const auto& j : jumps_) m += j.rate;
  if (general_) {
    if (!general_->finite_activity) return std::numeric_limits<double>::infinity();
    m += integrate_chopped(general_->density, 0.0, general_->support_bound, 1.0);
  }
  return m;
}

double LevyModel::tail_mass(double x) const {
  double m = 0.0;
  for (const auto& j : jumps_) m += j.rate * std::exp(-j.decay * x);
  if (general_ && x < general_->support_bound)
    m += integrate_chopped(general_->density, x, general_->support_bound, 1.0);
  return m;
}

double LevyModel::jump_density(double u) const {
  if (!(u > 0.0)) return 0.0;
  double d = 0.0;
  for (const auto& j : jumps_) d += j.rate * j.decay * std::exp(-j.decay * u);
  if (general_ && u < general_->support_bound) d += general_->density(u);
  return d;
}

double LevyModel::general_psi(double s) const {
  const auto& g = general_->density;
  const double small = tanh_sinh_01([&](double u) {
    if (u <= 0.0) return 0.0;
    const double z = -s * u;
    const double e = std::abs(z) < 1e-3 ? z * z * (0.5 + z * (1.0 / 6 + z / 24.0)) : std::expm1(z) - z;
    return e == 0.0 ? 0.0 : e * g(u);
  });
  const double large = integrate_chopped(
      [&](double u) { return std::expm1(-s * u) * g(u); }, 1.0,
      std::max(1.0, general_->support_bound), 1.0);
  return small + large;
}

std::complex<double> LevyModel::general_psi(std::complex<double> s) const {
  const auto& g = general_->density;
  auto small_part = [&](double u, bool imag) {
    if (u <= 0.0) return 0.0;
    const std::complex<double> z = -s * u;
    // exp(z) - 1 - z with a series for small |z|
    std::complex<double> e;
    if (std::abs(z) < 1e-3)
      e = z * z * (0.5 + z * (1.0 / 6 + z / 24.0));
    else
      e = std::exp(z) - 1.0 - z;
    const double part = imag ? e.imag() : e.real();
    return part == 0.0 ? 0.0 : part * g(u);
  };
  auto large_part = [&](double u, bool imag) {
    const std::complex<double> e = std::exp(-s * u) - 1.0;
    return (imag ? e.imag() : e.real()) * g(u);
  };
  const double ub = std::max(1.0, general_->support_bound);
  const double len = std::max(0.05, std::min(1.0, 2.0 / (std::abs(s.imag()) + 1.0)));
  const double re = small_jumps([&](double u) { return small_part(u, false); }, s) +
                    integrate_chopped([&](double u) { return large_part(u, false); }, 1.0, ub, len,
                                      {}, 1e-10);
  const double im = small_jumps([&](double u) { return small_part(u, true); }, s) +
                    integrate_chopped([&](double u) { return large_part(u, true); }, 1.0, ub, len,
                                      {}, 1e-10);
  return {re, im};
}

double LevyModel::psi(double s) const {
  double v = exp_drift_ * s + 0.5 * sigma_ * sigma_ * s * s;
  for (const auto& j : jumps_) v += j.rate * (j.decay / (j.decay + s) - 1.0);
  if (general_) v += general_psi(s);
  return v;
}

std::complex<double> LevyModel::psi(std::complex<double> s) const {
  std::complex<double> v = exp_drift_ * s + 0.5 * sigma_ * sigma_ * s * s;
  for (const auto& j : jumps_) v += j.rate * (j.decay / (j.decay + s) - 1.0);
  if (general_) v += general_psi(s);
  return v;
}

double LevyModel::psi_derivative(double s, int order) const {
  if (order != 1 && order != 2) throw ValidationError("psi_derivative order must be 1 or 2");
  if (s < 0.0) throw ValidationError("psi_derivative requires s >= 0");
  double v;
  if (order == 1) {
    v = exp_drift_ + sigma_ * sigma_ * s;
    for (const auto& j : jumps_) v -= j.rate * j.decay / ((j.decay + s) * (j.decay + s));
  } else {
    v = sigma_ * sigma_;
    for (const auto& j : jumps_) v += 2.0 * j.rate * j.decay / std::pow(j.decay + s, 3);
  }
  if (!general_) return v;

  if (order == 1 && s == 0.0) {
    if (!general_->finite_mean) return -std::numeric_limits<double>::infinity();
    const auto& g = general_->density;
    return v - integrate_chopped([&g](double u) { return u * g(u); }, 1.0,
                                 std::max(1.0, general_->support_bound), 1.0);
  }
  const double h = 1e-6 * std::max(1.0, s);
  if (order == 1) {
    if (s >= h) return v + (general_psi(s + h) - general_psi(s - h)) / (2 * h);
    return v + (general_psi(s + h) - general_psi(s)) / h;
  }
  const double hh = 1e-4 * std::max(1.0, s);
  if (s >= hh)
    return v + (general_psi(s + hh) - 2 * general_psi(s) + general_psi(s - hh)) / (hh * hh);
  return v + (general_psi(s + 2 * hh) - 2 * general_psi(s + hh) + general_psi(s)) / (hh * hh);
}

double LevyModel::phi(double q) const {
  if (!(q > 0.0)) throw ValidationError("phi requires q > 0");
  double hi = 1.0;
  while (psi(hi) <= q) {
    hi *= 2.0;
    if (hi > 1e12) throw SolverError("phi: could not bracket the root");
  }
  const double lo = hi > 1.0 ? hi / 2 : 0.0;
  auto f = [&](double s) { return psi(s) - q; };
  double r = find_root(f, lo, hi, f(lo), f(hi), 1e-15);
  if (is_hyperexponential()) {
    for (int i = 0; i < 3; ++i) {
      const double d = psi_derivative(r, 1);
      if (!(d > 0.0)) break;
      const double nr = r - f(r) / d;
      if (!(nr > lo && nr < hi)) break;
      r = nr;
    }
  }
  return r;
}

}  // namespace levyctl
