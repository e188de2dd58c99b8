#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "sta/errors.hpp"

namespace sta::num {

namespace detail {

template <class F>
double simpson_rec(const F& f, double a, double fa, double b, double fb,
                   double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol || (b - a) < 1e-14 * std::abs(b))
    return left + right + delta / 15.0;
  if (depth <= 0) throw QuadratureFailure("adaptive Simpson recursion depth exhausted");
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature. Tolerance is relative to a coarse estimate of
// the integral magnitude, with abs_floor as an absolute fallback for
// near-zero integrals.
template <class F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-10,
                 double abs_floor = 0.0, int max_depth = 48) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // coarse magnitude estimate from a small fixed sample
  double mag = 0.0;
  for (int i = 0; i <= 16; ++i) {
    const double t = a + (b - a) * i / 16.0;
    mag = std::max(mag, std::abs(f(t)));
  }
  const double tol = std::max(rel_tol * mag * std::abs(b - a), abs_floor);
  return detail::simpson_rec(f, a, fa, b, fb, 0.5 * (a + b), fm, whole,
                             std::max(tol, 1e-300), max_depth);
}

// Golden-section minimization on [a, b]; returns argmin. rel_tol is relative
// to the bracket scale.
template <class F>
double golden_min(const F& f, double a, double b, double rel_tol = 1e-6) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  const double scale = std::max(std::abs(a), std::abs(b)) + 1e-300;
  while ((b - a) > rel_tol * scale) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Local cubic (Catmull-Rom) interpolation of uniformly sampled values.
// Samples are at t = t0 + i*dt, i = 0..n-1; clamped one-sided at the ends.
inline double interp_cubic(const std::vector<double>& y, double t0, double dt,
                           double t) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(y.size());
  if (n == 1) return y[0];
  double u = (t - t0) / dt;
  std::ptrdiff_t i = static_cast<std::ptrdiff_t>(std::floor(u));
  if (i < 0) i = 0;
  if (i > n - 2) i = n - 2;
  const double x = u - static_cast<double>(i);
  const double y1 = y[i], y2 = y[i + 1];
  const double y0 = (i > 0) ? y[i - 1] : 3.0 * y1 - 3.0 * y2 + y[std::min(i + 2, n - 1)];
  const double y3 = (i + 2 < n) ? y[i + 2] : 3.0 * y2 - 3.0 * y1 + y[std::max(i - 1, std::ptrdiff_t{0})];
  const double a0 = -0.5 * y0 + 1.5 * y1 - 1.5 * y2 + 0.5 * y3;
  const double a1 = y0 - 2.5 * y1 + 2.0 * y2 - 0.5 * y3;
  const double a2 = 0.5 * (y2 - y0);
  return ((a0 * x + a1) * x + a2) * x + y1;
}

}  // namespace sta::num
