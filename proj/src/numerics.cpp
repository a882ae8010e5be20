#include "levyctl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "levyctl/errors.hpp"

namespace levyctl {

namespace {

struct Piece {
  double value;
  double err;
  double l1;
};

// Boost's own recursion compares an unscaled [-1, 1] error estimate against a
// scaled tolerance, so subdivision is driven here on top of the fixed rule.
Piece gk_adaptive(const RealFn& f, double a, double b, double abs_tol, int depth) {
  double err = 0.0;
  double l1 = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 0, 0.0, &err, &l1);
  err *= 0.5 * (b - a);
  if (depth == 0 || err <= std::max(abs_tol, 1e-13 * std::abs(v))) return {v, err, l1};
  const double mid = 0.5 * (a + b);
  const Piece lo = gk_adaptive(f, a, mid, 0.5 * abs_tol, depth - 1);
  const Piece hi = gk_adaptive(f, mid, b, 0.5 * abs_tol, depth - 1);
  return {lo.value + hi.value, lo.err + hi.err, lo.l1 + hi.l1};
}

double gk_segment(const RealFn& f, double a, double b, double abs_tol) {
  if (b - a <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)})) return (b - a) * f(0.5 * (a + b));
  const Piece r = gk_adaptive(f, a, b, abs_tol, 18);
  if (!std::isfinite(r.value)) throw ConvergenceError("quadrature produced a non-finite value", r.err);
  if (r.err > 1e3 * abs_tol + 1e-8 * r.l1) {
    std::ostringstream os;
    os.precision(17);
    os << "quadrature did not converge on [" << a << ", " << b << "], |I|_1 = " << r.l1;
    throw ConvergenceError(os.str(), r.err);
  }
  return r.value;
}

}  // namespace

double integrate(const RealFn& f, double a, double b, std::span<const double> breaks,
                 double abs_tol) {
  if (!(b > a)) return 0.0;
  std::vector<double> pts{a};
  for (double x : breaks)
    if (x > a && x < b) pts.push_back(x);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] - pts[i] <= 0.0) continue;
    total += gk_segment(f, pts[i], pts[i + 1], abs_tol);
  }
  return total;
}

double integrate_chopped(const RealFn& f, double a, double b, double max_len,
                         std::span<const double> breaks, double abs_tol) {
  if (!(b > a)) return 0.0;
  std::vector<double> pts(breaks.begin(), breaks.end());
  const int n = static_cast<int>(std::ceil((b - a) / max_len));
  for (int i = 1; i < n; ++i) pts.push_back(a + (b - a) * i / n);
  return integrate(f, a, b, pts, abs_tol);
}

double find_root(const RealFn& f, double lo, double hi, double f_lo, double f_hi,
                 double x_tol) {
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0) == (f_hi > 0)) throw SolverError("find_root: no sign change on bracket");
  std::uintmax_t iters = 300;
  auto tol = [x_tol](double u, double v) {
    return std::abs(u - v) <= x_tol * std::max(1.0, std::abs(u));
  };
  auto r = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

double find_root(const RealFn& f, double lo, double hi) {
  return find_root(f, lo, hi, f(lo), f(hi));
}

double sign_change(const RealFn& f, double lo, double hi) {
  const double f_lo = f(lo);
  if (f_lo >= 0.0) return lo;
  const double f_hi = f(hi);
  if (f_hi <= 0.0) return hi;
  return find_root(f, lo, hi, f_lo, f_hi);
}

Extremum minimize_scan(const RealFn& f, double lo, double hi, int samples) {
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  std::vector<double> xs = linspace(lo, hi, samples + 1);
  for (int i = 0; i <= samples; ++i) {
    const double v = f(xs[i]);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  const double a = xs[std::max(0, best - 1)];
  const double b = xs[std::min(samples, best + 1)];
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::brent_find_minima(f, a, b, 52, iters);
  if (r.second <= best_v) return {r.first, r.second};
  return {xs[best], best_v};
}

double increasing_crossing(const RealFn& g, double lo_end, double hi_end) {
  const bool lo_fin = std::isfinite(lo_end);
  const bool hi_fin = std::isfinite(hi_end);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double lo = lo_fin ? lo_end : std::min(-1.0, (hi_fin ? hi_end : 0.0) - 1.0);
  double hi = hi_fin ? hi_end : std::max(1.0, lo + 2.0);
  double g_lo = g(lo);
  while (g_lo >= 0.0) {
    if (lo_fin && lo == lo_end) return lo;
    const double width = hi - lo;
    hi = lo;
    lo -= 2.0 * width;
    if (lo < -1e8) return -kInf;
    if (lo_fin) lo = std::max(lo, lo_end);
    g_lo = g(lo);
  }
  double g_hi = g(hi);
  while (g_hi <= 0.0) {
    if (hi_fin && hi == hi_end) return hi;
    const double width = hi - lo;
    lo = hi;
    g_lo = g_hi;
    hi += 2.0 * width;
    if (hi > 1e8) return kInf;
    if (hi_fin) hi = std::min(hi, hi_end);
    g_hi = g(hi);
  }
  return find_root(g, lo, hi, g_lo, g_hi, 1e-15);
}

InnerExtremum inner_minimum(const RealFn& F, const RealFn& dF, double a, double len, int n) {
  std::vector<double> bs(n + 1), vs(n + 1);
  int best = 0;
  for (int i = 0; i <= n; ++i) {
    bs[i] = a + len * i / n;
    vs[i] = F(bs[i]);
    if (vs[i] < vs[best]) best = i;
  }
  if (best == n) return {bs[n], vs[n], true};
  const int c = std::max(best, 1);
  const double lo = std::max(bs[c - 1], a + 1e-14 * std::max(1.0, std::abs(a)));
  const double hi = bs[c + 1];
  const double d_lo = dF(lo);
  const double d_hi = dF(hi);
  double b;
  if (d_lo <= 0.0 && d_hi >= 0.0)
    b = find_root(dF, lo, hi, d_lo, d_hi, 1e-15);
  else
    b = minimize_scan(F, lo, hi, 16).x;
  const double v = F(b);
  if (vs[0] <= v) return {a, vs[0], false};
  return {b, v, false};
}

double expm1_minus_linear(double z) {
  if (std::abs(z) < 1e-3) {
    // z^2/2 + z^3/6 + z^4/24 + z^5/120
    return z * z * (0.5 + z * (1.0 / 6 + z * (1.0 / 24 + z / 120)));
  }
  return std::expm1(z) - z;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  out[n - 1] = hi;
  return out;
}

}  // namespace levyctl
