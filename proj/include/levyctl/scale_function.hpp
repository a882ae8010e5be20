#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "levyctl/levy_model.hpp"
#include "levyctl/numerics.hpp"
#include "levyctl/piecewise_polynomial.hpp"

namespace levyctl {

enum class Backend { PartialFraction, LaplaceInversion };
enum class Side { Left, Right };

const char* to_string(Backend b);

/// One exponential mode W(x) = sum_k coeff_k exp(root_k x) for x >= 0.
struct PartialFractionTerm {
  double root;
  double coeff;  // 1 / psi'(root)
};

/// q-scale function W and its derived family for a fixed q > 0.
/// Immutable after construction; every evaluator is pure.
class ScaleFamily {
 public:
  ScaleFamily(LevyModel model, double q, Backend backend = Backend::PartialFraction);

  const LevyModel& model() const { return model_; }
  double q() const { return q_; }
  double phi() const { return phi_; }
  Backend backend() const { return backend_; }
  /// psi'(Phi(q))
  double psi_prime_phi() const { return dpsi_phi_; }
  /// Partial-fraction data (empty for the inversion backend); the Phi term comes first.
  const std::vector<PartialFractionTerm>& terms() const { return terms_; }

  double W(double x) const;
  double W_prime(double x, Side side = Side::Right) const;
  double W_second(double x) const;
  double Z(double x) const;
  double Wbar(double x) const;
  double Zbar(double x) const;
  double R(double x) const;
  double Theta(double y) const;
  double Thetabar(double x) const;
  /// exp(Phi z)/psi'(Phi) - W(z) for z >= 0: bounded, decaying.
  double resolvent_remainder(double z) const;
  /// int_0^x resolvent_remainder
  double resolvent_remainder_integral(double x) const;
  /// Decay rate of resolvent_remainder (slowest negative mode).
  double remainder_decay() const;

  /// W(0): 1/delta for bounded variation, 0 otherwise.
  double W0() const { return w0_; }
  /// W'(0+): 2/sigma^2, (q + nu)/delta^2, or +inf.
  double W_prime0() const { return wp0_; }
  bool has_second_derivative() const { return std::isfinite(wp0_); }

  /// phi_s(x; h) = int_s^x W(x - y) h(y) dy
  double phi_integral(double s, double x, const RealFn& h,
                      std::span<const double> breaks = {}) const;
  double phi_integral(double s, double x, const PiecewisePolynomial& h) const;
  /// int_s^x W'(x - y) h(y) dy (no boundary term)
  double phi_prime_integral(double s, double x, const RealFn& h,
                            std::span<const double> breaks = {}) const;
  /// Psi(s; h) = int_0^inf exp(-Phi y) h(y + s) dy
  double psi_integral(double s, const RealFn& h, double growth_bound,
                      std::span<const double> breaks = {}) const;
  double psi_integral(double s, const PiecewisePolynomial& h) const;

  /// Fixed-Talbot inversion of a transform at t > 0 (32 nodes).
  template <class F>
  static double talbot(const F& transform, double t);
  /// Abate-Whitt Euler-summed Fourier series on the line Re s = 9.2 / t.
  /// Never leaves the right half-plane, so it suits general jump densities.
  template <class F>
  static double euler(const F& transform, double t);

 private:
  enum class Kernel { Resolvent, ResolventInt1, ResolventInt2, Theta, ThetaInt, ThetaPrime };
  void build_partial_fraction();
  std::complex<double> remainder_D(std::complex<double> s) const;
  double invert(Kernel k, double t) const;

  LevyModel model_;
  double q_;
  Backend backend_;
  double phi_ = 0.0;
  double dpsi_phi_ = 0.0;
  double dpsi0_ = 0.0;
  double w0_ = 0.0;
  double wp0_ = 0.0;
  std::vector<PartialFractionTerm> terms_;
};

namespace detail {
struct TalbotNodes {
  static constexpr int M = 32;
  double theta[M];
  double cot[M];
  double sigma[M];
  TalbotNodes();
};
const TalbotNodes& talbot_nodes();
}  // namespace detail

template <class F>
double ScaleFamily::talbot(const F& transform, double t) {
  const auto& n = detail::talbot_nodes();
  constexpr int M = detail::TalbotNodes::M;
  const double r = 2.0 * M / (5.0 * t);
  double acc = 0.5 * std::real(transform(std::complex<double>(r, 0.0))) * std::exp(r * t);
  for (int k = 1; k < M; ++k) {
    const std::complex<double> s(r * n.theta[k] * n.cot[k], r * n.theta[k]);
    const std::complex<double> w(1.0, n.sigma[k]);
    acc += std::real(std::exp(t * s) * transform(s) * w);
  }
  return r / M * acc;
}

template <class F>
double ScaleFamily::euler(const F& transform, double t) {
  constexpr double A = 18.4;
  constexpr int N = 20, M = 11;
  const double pi = 3.14159265358979323846;
  const double scale = std::exp(A / 2.0) / t;
  double partial = 0.5 * scale * std::real(transform(std::complex<double>(A / (2.0 * t), 0.0)));
  std::array<double, M + 1> tail{};
  for (int k = 1; k <= N + M; ++k) {
    const std::complex<double> s(A / (2.0 * t), k * pi / t);
    partial += (k % 2 ? -scale : scale) * std::real(transform(s));
    if (k >= N) tail[k - N] = partial;
  }
  double acc = 0.0, binom = 1.0;
  for (int j = 0; j <= M; ++j) {
    acc += binom * tail[j];
    binom = binom * (M - j) / (j + 1);
  }
  return acc / std::ldexp(1.0, M);
}

}  // namespace levyctl
