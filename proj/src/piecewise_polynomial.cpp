#include "levyctl/piecewise_polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "levyctl/errors.hpp"
#include "levyctl/numerics.hpp"

namespace levyctl {

PiecewisePolynomial::PiecewisePolynomial(std::vector<double> breakpoints,
                                         std::vector<std::vector<double>> pieces)
    : breaks_(std::move(breakpoints)), pieces_(std::move(pieces)) {
  if (pieces_.size() != breaks_.size() + 1)
    throw ValidationError("piecewise polynomial needs breakpoints.size() + 1 pieces");
  for (std::size_t i = 1; i < breaks_.size(); ++i)
    if (!(breaks_[i] > breaks_[i - 1]))
      throw ValidationError("piecewise polynomial breakpoints must be increasing");
  for (auto& p : pieces_) {
    if (p.empty()) p.push_back(0.0);
    for (double c : p)
      if (!std::isfinite(c)) throw ValidationError("non-finite polynomial coefficient");
  }
}

PiecewisePolynomial PiecewisePolynomial::abs_kink(double c, double slope_left,
                                                  double slope_right) {
  return PiecewisePolynomial({c}, {{slope_left * c, -slope_left}, {-slope_right * c, slope_right}});
}

std::size_t PiecewisePolynomial::piece_index(double x) const {
  return static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), x) -
                                  breaks_.begin());
}

double PiecewisePolynomial::eval_poly(const std::vector<double>& c, double x, int k) {
  const int n = static_cast<int>(c.size());
  double acc = 0.0;
  for (int i = n - 1; i >= k; --i) {
    double coef = c[i];
    for (int j = 0; j < k; ++j) coef *= (i - j);
    acc = acc * x + coef;
  }
  return acc;
}

double PiecewisePolynomial::operator()(double x) const {
  return eval_poly(pieces_[piece_index(x)], x, 0);
}

double PiecewisePolynomial::left(double x) const {
  const auto it = std::lower_bound(breaks_.begin(), breaks_.end(), x);
  return eval_poly(pieces_[static_cast<std::size_t>(it - breaks_.begin())], x, 0);
}

double PiecewisePolynomial::derivative_at(double x, int k) const {
  return eval_poly(pieces_[piece_index(x)], x, k);
}

int PiecewisePolynomial::degree() const {
  int d = 0;
  for (const auto& p : pieces_) d = std::max(d, static_cast<int>(p.size()) - 1);
  return d;
}

bool PiecewisePolynomial::is_zero() const {
  for (const auto& p : pieces_)
    for (double c : p)
      if (c != 0.0) return false;
  return true;
}

PiecewisePolynomial PiecewisePolynomial::derivative() const {
  std::vector<std::vector<double>> out;
  out.reserve(pieces_.size());
  for (const auto& p : pieces_) {
    std::vector<double> d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<double>(i));
    if (d.empty()) d.push_back(0.0);
    out.push_back(std::move(d));
  }
  return PiecewisePolynomial(breaks_, std::move(out));
}

PiecewisePolynomial PiecewisePolynomial::plus_linear(double slope) const {
  auto out = pieces_;
  for (auto& p : out) {
    if (p.size() < 2) p.resize(2, 0.0);
    p[1] += slope;
  }
  return PiecewisePolynomial(breaks_, std::move(out));
}

PiecewisePolynomial PiecewisePolynomial::scaled(double c) const {
  auto out = pieces_;
  for (auto& p : out)
    for (double& v : p) v *= c;
  return PiecewisePolynomial(breaks_, std::move(out));
}

PiecewisePolynomial PiecewisePolynomial::plus(const PiecewisePolynomial& other) const {
  std::vector<double> br = breaks_;
  br.insert(br.end(), other.breaks_.begin(), other.breaks_.end());
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i <= br.size(); ++i) {
    // representative point inside piece i of the merged partition
    double x;
    if (br.empty()) x = 0.0;
    else if (i == 0) x = br.front() - 1.0;
    else if (i == br.size()) x = br.back() + 1.0;
    else x = 0.5 * (br[i - 1] + br[i]);
    const auto& a = pieces_[piece_index(x)];
    const auto& b = other.pieces_[other.piece_index(x)];
    std::vector<double> c(std::max(a.size(), b.size()), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) c[k] += a[k];
    for (std::size_t k = 0; k < b.size(); ++k) c[k] += b[k];
    out.push_back(std::move(c));
  }
  return PiecewisePolynomial(std::move(br), std::move(out));
}

double PiecewisePolynomial::exp_tail(double y, double rate) const {
  if (!(rate > 0.0)) throw PreconditionError("exp_tail requires a positive rate");
  std::size_t idx = piece_index(y);
  double lo = y;
  double total = 0.0;
  while (true) {
    const auto& p = pieces_[idx];
    const bool last = idx >= breaks_.size();
    const double hi = last ? 0.0 : breaks_[idx];
    const double w_lo = std::exp(-rate * (lo - y));
    const double w_hi = last ? 0.0 : std::exp(-rate * (hi - y));
    double rk = rate;
    for (int k = 0; k < static_cast<int>(p.size()); ++k) {
      double term = w_lo * eval_poly(p, lo, k);
      if (!last) term -= w_hi * eval_poly(p, hi, k);
      total += term / rk;
      rk *= rate;
    }
    if (last) break;
    lo = hi;
    ++idx;
  }
  return total;
}

bool PiecewisePolynomial::is_continuous(double tol) const {
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    const double b = breaks_[i];
    const double l = eval_poly(pieces_[i], b, 0);
    const double r = eval_poly(pieces_[i + 1], b, 0);
    if (std::abs(l - r) > tol * std::max(1.0, std::abs(l))) return false;
  }
  return true;
}

bool PiecewisePolynomial::is_convex(double tol) const {
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const double lo = i == 0 ? (breaks_.empty() ? -50.0 : breaks_.front() - 50.0) : breaks_[i - 1];
    const double hi = i == breaks_.size() ? (breaks_.empty() ? 50.0 : breaks_.back() + 50.0)
                                          : breaks_[i];
    for (double x : linspace(lo, hi, 41))
      if (eval_poly(pieces_[i], x, 2) < -tol) return false;
    if (pieces_[i].size() > 3 && (i == 0 || i == breaks_.size())) {
      // outer pieces of degree > 2 must have a nonnegative leading behaviour
      const double far = i == 0 ? lo - 1e3 : hi + 1e3;
      if (eval_poly(pieces_[i], far, 2) < -tol) return false;
    }
  }
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    const double b = breaks_[i];
    if (eval_poly(pieces_[i + 1], b, 1) < eval_poly(pieces_[i], b, 1) - tol) return false;
  }
  return true;
}

}  // namespace levyctl
