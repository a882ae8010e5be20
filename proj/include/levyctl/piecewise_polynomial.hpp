#pragma once

#include <vector>

namespace levyctl {

/// Piecewise polynomial in the global variable x. With breakpoints
/// b_1 < ... < b_m, piece 0 covers (-inf, b_1), piece i covers [b_i, b_{i+1}),
/// piece m covers [b_m, inf). Evaluation at a breakpoint uses the right piece.
class PiecewisePolynomial {
 public:
  PiecewisePolynomial() : pieces_{{0.0}} {}
  /// coefficients c0 + c1 x + c2 x^2 + ...
  explicit PiecewisePolynomial(std::vector<double> coeffs) : pieces_{std::move(coeffs)} {}
  PiecewisePolynomial(std::vector<double> breakpoints, std::vector<std::vector<double>> pieces);

  static PiecewisePolynomial constant(double c) { return PiecewisePolynomial({c}); }
  /// |x - c| scaled by the slope
  static PiecewisePolynomial abs_kink(double c, double slope_left, double slope_right);

  double operator()(double x) const;
  double left(double x) const;
  /// k-th derivative of the piece containing x (right-continuous)
  double derivative_at(double x, int k) const;

  PiecewisePolynomial derivative() const;
  PiecewisePolynomial plus_linear(double slope) const;
  PiecewisePolynomial scaled(double c) const;
  PiecewisePolynomial plus(const PiecewisePolynomial& other) const;

  /// int_0^inf exp(-rate u) p(y + u) du in closed form. rate > 0.
  double exp_tail(double y, double rate) const;

  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<std::vector<double>>& pieces() const { return pieces_; }
  int degree() const;
  bool is_zero() const;
  bool is_continuous(double tol = 1e-10) const;
  /// Checked on each piece by sampling the second derivative and the jumps of
  /// the first derivative at breakpoints.
  bool is_convex(double tol = 1e-12) const;

 private:
  std::size_t piece_index(double x) const;
  static double eval_poly(const std::vector<double>& c, double x, int k);

  std::vector<double> breaks_;
  std::vector<std::vector<double>> pieces_;
};

}  // namespace levyctl
