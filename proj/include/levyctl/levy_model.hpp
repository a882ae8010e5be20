#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace levyctl {

/// Downward jumps of size u > 0 with density rate * decay * exp(-decay * u).
struct ExpJump {
  double rate;
  double decay;
};

/// Jump density on u > 0 (jump = -u). The library cannot infer integrability
/// from a function handle, so the caller declares it.
struct GeneralDensity {
  std::function<double(double)> density;
  bool levy_integrable = true;    // int min(1, u^2) g(u) du < inf
  bool finite_variation = false;  // int_0^1 u g(u) du < inf
  bool finite_activity = false;   // int g < inf
  bool finite_mean = true;        // int_1^inf u g(u) du < inf
  double support_bound = 60.0;    // g treated as 0 beyond this
};

enum class Variation { Bounded, Unbounded };

class LevyModel {
 public:
  /// gamma is the drift coefficient of the compensated (indicator) form.
  static LevyModel with_gamma(double sigma, double gamma, std::vector<ExpJump> jumps = {},
                              std::optional<GeneralDensity> general = std::nullopt);
  /// delta is the drift of the uncompensated form; requires finite-variation jumps.
  static LevyModel with_delta(double sigma, double delta, std::vector<ExpJump> jumps = {},
                              std::optional<GeneralDensity> general = std::nullopt);

  double sigma() const { return sigma_; }
  double gamma() const { return gamma_; }
  /// Uncompensated drift; only meaningful when the jump part has finite variation.
  double delta() const;
  const std::vector<ExpJump>& jumps() const { return jumps_; }
  const std::optional<GeneralDensity>& general() const { return general_; }
  bool is_hyperexponential() const { return !general_.has_value(); }

  double psi(double s) const;
  std::complex<double> psi(std::complex<double> s) const;
  /// order 1 or 2. At s = 0, order 1 returns psi'(0+), -inf for infinite mean.
  double psi_derivative(double s, int order) const;
  double phi(double q) const;

  Variation variation() const;
  bool finite_activity() const;
  bool finite_mean() const;
  /// nu(-inf, 0); +inf for infinite activity.
  double jump_mass() const;
  /// nu(-inf, -x) for x > 0.
  double tail_mass(double x) const;
  /// Jump density at size u > 0 (jump -u).
  double jump_density(double u) const;
  /// psi'(0+) = E X_1
  double mean() const { return psi_derivative(0.0, 1); }
  /// Coefficient of s in psi with exponential jump terms written
  /// uncompensated and the general density compensated on (0, 1).
  double linear_coefficient() const { return exp_drift_; }

 private:
  LevyModel() = default;
  void validate() const;
  double general_psi(double s) const;
  std::complex<double> general_psi(std::complex<double> s) const;

  double sigma_ = 0.0;
  double gamma_ = 0.0;
  double exp_drift_ = 0.0;  // gamma + sum_i int_0^1 u nu_i(du)
  std::vector<ExpJump> jumps_;
  std::optional<GeneralDensity> general_;
};

}  // namespace levyctl
