#pragma once

#include <functional>
#include <span>
#include <vector>

namespace levyctl {

using RealFn = std::function<double(double)>;

/// Adaptive Gauss-Kronrod on [a, b], split at every breakpoint strictly inside.
/// Returns 0 when b <= a. Throws ConvergenceError if the error estimate
/// exceeds abs_tol + 1e-9 |I| by a wide margin.
double integrate(const RealFn& f, double a, double b, std::span<const double> breaks = {},
                 double abs_tol = 1e-12);

/// Same, but additionally chops [a, b] into pieces no longer than max_len.
double integrate_chopped(const RealFn& f, double a, double b, double max_len,
                         std::span<const double> breaks = {}, double abs_tol = 1e-12);

/// Root of f on [lo, hi] given a sign change (f(lo) * f(hi) <= 0).
double find_root(const RealFn& f, double lo, double hi, double f_lo, double f_hi,
                 double x_tol = 1e-14);
double find_root(const RealFn& f, double lo, double hi);

/// Sign-change point of a function that is negative left and positive right
/// on [lo, hi]. Returns lo if f(lo) >= 0 and hi if f(hi) <= 0.
double sign_change(const RealFn& f, double lo, double hi);

struct Extremum {
  double x;
  double value;
};

/// Minimum of f on [lo, hi] by a coarse scan followed by Brent's method
/// around the best sample.
Extremum minimize_scan(const RealFn& f, double lo, double hi, int samples = 64);

/// Crossing from negative to positive of an increasing g on [lo, hi] (either
/// end may be infinite). Returns the end itself when g has constant sign
/// there; +-inf when no crossing is found on an unbounded side.
double increasing_crossing(const RealFn& g, double lo, double hi);

struct InnerExtremum {
  double arg;
  double value;
  bool capped;  // the scan's best point was the far end a + len
};

/// min over b in [a, a + len] of F(b), where dF is F' in b: a scan of n
/// points, then the root of dF bracketed around the best sample.
InnerExtremum inner_minimum(const RealFn& F, const RealFn& dF, double a, double len, int n = 64);

/// exp(r x) - 1 - r x, accurate for small |r x|.
double expm1_minus_linear(double z);

std::vector<double> linspace(double lo, double hi, int n);

}  // namespace levyctl
