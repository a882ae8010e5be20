#include "levyctl/scale_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "levyctl/errors.hpp"

namespace levyctl {

const char* to_string(Backend b) {
  return b == Backend::PartialFraction ? "partial_fraction" : "laplace_inversion";
}

namespace detail {

TalbotNodes::TalbotNodes() {
  theta[0] = 0.0;
  cot[0] = 0.0;
  sigma[0] = 0.0;
  for (int k = 1; k < M; ++k) {
    const double th = k * std::numbers::pi / M;
    const double c = std::cos(th) / std::sin(th);
    theta[k] = th;
    cot[k] = c;
    sigma[k] = th + (th * c - 1.0) * c;
  }
}

const TalbotNodes& talbot_nodes() {
  static const TalbotNodes nodes;
  return nodes;
}

}  // namespace detail

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// psi' on the real line, valid below zero for rational psi.
double dpsi_rational(const LevyModel& m, double s) {
  double v = m.psi_derivative(0.0, 1) + m.sigma() * m.sigma() * s;
  for (const auto& j : m.jumps())
    v += j.rate / j.decay - j.rate * j.decay / ((j.decay + s) * (j.decay + s));
  return v;
}

}  // namespace

ScaleFamily::ScaleFamily(LevyModel model, double q, Backend backend)
    : model_(std::move(model)), q_(q), backend_(backend) {
  if (!(q > 0.0) || !std::isfinite(q)) throw ValidationError("q must be > 0");
  phi_ = model_.phi(q_);
  dpsi_phi_ = model_.psi_derivative(phi_, 1);
  dpsi0_ = model_.psi_derivative(0.0, 1);
  if (model_.variation() == Variation::Bounded) {
    const double d = model_.delta();
    w0_ = 1.0 / d;
    wp0_ = model_.finite_activity() ? (q_ + model_.jump_mass()) / (d * d) : kInf;
  } else {
    w0_ = 0.0;
    wp0_ = model_.sigma() > 0.0 ? 2.0 / (model_.sigma() * model_.sigma()) : kInf;
  }
  if (backend_ == Backend::PartialFraction) build_partial_fraction();
}

void ScaleFamily::build_partial_fraction() {
  if (!model_.is_hyperexponential())
    throw ValidationError("partial-fraction backend requires hyperexponential jumps");
  auto f = [this](double s) { return model_.psi(s) - q_; };
  std::vector<double> roots{phi_};

  std::vector<double> eta;
  for (const auto& j : model_.jumps()) eta.push_back(j.decay);
  std::sort(eta.begin(), eta.end());

  auto root_between = [&](double lo, double hi) {
    return find_root(f, lo, hi, f(lo), f(hi), 1e-15);
  };
  auto below = [&](double hi) {
    double step = std::max(1.0, std::abs(hi));
    double lo = hi - step;
    while (f(lo) <= 0.0) {
      step *= 2.0;
      lo = hi - step;
      if (step > 1e14) throw SolverError("partial fractions: cannot bracket the lowest root");
    }
    return root_between(lo, hi);
  };

  if (eta.empty()) {
    if (model_.sigma() > 0.0) roots.push_back(below(0.0));
  } else {
    const double e1 = eta.front();
    roots.push_back(root_between(-e1 * (1.0 - 1e-13), 0.0));
    for (std::size_t i = 0; i + 1 < eta.size(); ++i) {
      const double hi = -eta[i] * (1.0 + 1e-13);
      const double lo = -eta[i + 1] * (1.0 - 1e-13);
      roots.push_back(root_between(lo, hi));
    }
    if (model_.sigma() > 0.0) roots.push_back(below(-eta.back() * (1.0 + 1e-13)));
  }

  terms_.clear();
  for (double r : roots) {
    const double d = r == phi_ ? dpsi_phi_ : dpsi_rational(model_, r);
    if (std::abs(d) < 1e-10)
      throw DegeneracyError("partial fractions: repeated root of psi(s) = q near " +
                            std::to_string(r));
    terms_.push_back({r, 1.0 / d});
  }
}

std::complex<double> ScaleFamily::remainder_D(std::complex<double> s) const {
  if (model_.is_hyperexponential()) {
    std::complex<double> d = 0.5 * model_.sigma() * model_.sigma();
    for (const auto& j : model_.jumps()) {
      const double ep = j.decay + phi_;
      d += j.rate * j.decay / ((j.decay + s) * ep * ep);
    }
    return d;
  }
  const std::complex<double> ds = s - phi_;
  if (std::abs(ds) < 1e-3 * (1.0 + phi_)) return 0.5 * model_.psi_derivative(phi_, 2);
  return (model_.psi(s) - q_ - ds * dpsi_phi_) / (ds * ds);
}

double ScaleFamily::invert(Kernel k, double t) const {
  const double theta0 = wp0_ - phi_ * w0_;
  auto transform = [&](std::complex<double> s) -> std::complex<double> {
    const std::complex<double> d = remainder_D(s);
    const std::complex<double> g = 1.0 / (dpsi_phi_ + (s - phi_) * d);
    switch (k) {
      case Kernel::Resolvent: return d * g / dpsi_phi_;
      case Kernel::ResolventInt1: return d * g / (dpsi_phi_ * s);
      case Kernel::ResolventInt2: return d * g / (dpsi_phi_ * s * s);
      case Kernel::Theta: return g - w0_;
      case Kernel::ThetaInt: return g / s;
      case Kernel::ThetaPrime: return s * (g - w0_) - theta0;
    }
    return 0.0;
  };
  const double v = model_.is_hyperexponential() ? talbot(transform, t) : euler(transform, t);
  if (!std::isfinite(v)) throw ConvergenceError("Laplace inversion failed", t);
  return v;
}

namespace {
constexpr double kTiny = 1e-12;
}

double ScaleFamily::W(double x) const {
  if (x < 0.0) return 0.0;
  if (backend_ == Backend::PartialFraction) {
    double v = 0.0;
    for (const auto& t : terms_) v += t.coeff * std::exp(t.root * x);
    return v;
  }
  if (x < kTiny) return w0_;
  return std::exp(phi_ * x) / dpsi_phi_ - invert(Kernel::Resolvent, x);
}

double ScaleFamily::W_prime(double x, Side side) const {
  if (x < 0.0 || (x == 0.0 && side == Side::Left)) return 0.0;
  if (backend_ == Backend::PartialFraction) {
    double v = 0.0;
    for (const auto& t : terms_) v += t.coeff * t.root * std::exp(t.root * x);
    return v;
  }
  if (x < kTiny) return wp0_;
  return Theta(x) + phi_ * W(x);
}

double ScaleFamily::W_second(double x) const {
  if (x < 0.0) return 0.0;
  if (backend_ == Backend::PartialFraction) {
    double v = 0.0;
    for (const auto& t : terms_) v += t.coeff * t.root * t.root * std::exp(t.root * x);
    return v;
  }
  if (!has_second_derivative())
    throw PreconditionError("W'' unavailable: W'(0+) is infinite for this model");
  if (x < kTiny) x = kTiny;
  return invert(Kernel::ThetaPrime, x) + phi_ * W_prime(x);
}

double ScaleFamily::Wbar(double x) const {
  if (x <= 0.0) return 0.0;
  if (backend_ == Backend::PartialFraction) {
    double v = 0.0;
    for (const auto& t : terms_) v += t.coeff * std::expm1(t.root * x) / t.root;
    return v;
  }
  if (x < kTiny) return w0_ * x;
  return std::expm1(phi_ * x) / (phi_ * dpsi_phi_) - invert(Kernel::ResolventInt1, x);
}

double ScaleFamily::Z(double x) const { return 1.0 + q_ * Wbar(x); }

double ScaleFamily::Zbar(double x) const {
  if (x <= 0.0) return x;
  if (backend_ == Backend::PartialFraction) {
    double v = 0.0;
    for (const auto& t : terms_)
      v += t.coeff * expm1_minus_linear(t.root * x) / (t.root * t.root);
    return x + q_ * v;
  }
  if (x < kTiny) return x;
  return x + q_ * (expm1_minus_linear(phi_ * x) / (phi_ * phi_ * dpsi_phi_) -
                   invert(Kernel::ResolventInt2, x));
}

double ScaleFamily::R(double x) const {
  if (!std::isfinite(dpsi0_))
    throw PreconditionError("R requires psi'(0+) > -inf (finite mean)");
  return Zbar(x) + dpsi0_ / q_;
}

double ScaleFamily::Theta(double y) const {
  if (y < 0.0) return 0.0;
  if (backend_ == Backend::PartialFraction) {
    double v = 0.0;
    for (std::size_t i = 1; i < terms_.size(); ++i) {
      const auto& t = terms_[i];
      v += t.coeff * (t.root - phi_) * std::exp(t.root * y);
    }
    return v;
  }
  if (y < kTiny) return wp0_ - phi_ * w0_;
  return invert(Kernel::Theta, y);
}

double ScaleFamily::Thetabar(double x) const {
  if (x < 0.0) return 0.0;
  if (backend_ == Backend::PartialFraction) {
    double v = terms_.front().coeff;
    for (std::size_t i = 1; i < terms_.size(); ++i) {
      const auto& t = terms_[i];
      v += t.coeff * (std::exp(t.root * x) - phi_ * std::expm1(t.root * x) / t.root);
    }
    return v;
  }
  if (x < kTiny) return w0_;
  return invert(Kernel::ThetaInt, x);
}

double ScaleFamily::resolvent_remainder(double z) const {
  if (z < 0.0) return 0.0;
  if (backend_ == Backend::PartialFraction) {
    double v = 0.0;
    for (std::size_t i = 1; i < terms_.size(); ++i)
      v -= terms_[i].coeff * std::exp(terms_[i].root * z);
    return v;
  }
  if (z < kTiny) return 1.0 / dpsi_phi_ - w0_;
  return invert(Kernel::Resolvent, z);
}

double ScaleFamily::resolvent_remainder_integral(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (backend_ == Backend::PartialFraction) {
    double v = 0.0;
    for (std::size_t i = 1; i < terms_.size(); ++i) {
      const double r = terms_[i].root;
      v -= terms_[i].coeff * std::expm1(r * x) / r;
    }
    return v;
  }
  if (x < kTiny) return (1.0 / dpsi_phi_ - w0_) * x;
  return invert(Kernel::ResolventInt1, x);
}

double ScaleFamily::remainder_decay() const {
  if (backend_ == Backend::PartialFraction) {
    double rate = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < terms_.size(); ++i) rate = std::min(rate, -terms_[i].root);
    return std::isfinite(rate) ? rate : 1.0;
  }
  double rate = model_.sigma() > 0.0 ? phi_ : 1.0;
  for (const auto& j : model_.jumps()) rate = std::min(rate, j.decay);
  return std::min(rate, 1.0);
}

double ScaleFamily::phi_integral(double s, double x, const RealFn& h,
                                 std::span<const double> breaks) const {
  if (!(x > s)) return 0.0;
  auto integrand = [&](double y) { return W(x - y) * h(y); };
  return integrate_chopped(integrand, s, x, std::max(0.25, 2.0 / phi_), breaks, 1e-12);
}

double ScaleFamily::phi_integral(double s, double x, const PiecewisePolynomial& h) const {
  return phi_integral(s, x, [&h](double y) { return h(y); }, h.breakpoints());
}

double ScaleFamily::phi_prime_integral(double s, double x, const RealFn& h,
                                       std::span<const double> breaks) const {
  if (!(x > s)) return 0.0;
  auto integrand = [&](double y) { return W_prime(x - y) * h(y); };
  return integrate_chopped(integrand, s, x, std::max(0.25, 2.0 / phi_), breaks, 1e-12);
}

double ScaleFamily::psi_integral(double s, const RealFn& h, double growth_bound,
                                 std::span<const double> breaks) const {
  if (!(growth_bound < phi_))
    throw PreconditionError("Psi(s; h) diverges: growth bound >= Phi(q)");
  const double rate = phi_ - growth_bound;
  const double y_star = 40.0 / rate;
  std::vector<double> shifted;
  for (double b : breaks) shifted.push_back(b - s);
  auto integrand = [&](double y) { return std::exp(-phi_ * y) * h(y + s); };
  return integrate_chopped(integrand, 0.0, y_star, 2.0 / rate, shifted, 1e-13);
}

double ScaleFamily::psi_integral(double s, const PiecewisePolynomial& h) const {
  return h.exp_tail(s, phi_);
}

}  // namespace levyctl
