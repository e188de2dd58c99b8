#pragma once

// Adaptive Cash-Karp RK4(5) integrator for small systems. Test-side oracle:
// kept independent of the library's closed-form evaluation paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

template <std::size_t N>
using OdeState = std::array<double, N>;

template <std::size_t N>
OdeState<N> integrate_ode(
    const std::function<OdeState<N>(double, const OdeState<N>&)>& rhs,
    OdeState<N> y, double t0, double t1, double rel_tol = 1e-10,
    double abs_tol = 0.0) {
  static constexpr double a2 = 0.2, a3 = 0.3, a4 = 0.6, a5 = 1.0, a6 = 0.875;
  static constexpr double b21 = 0.2;
  static constexpr double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
  static constexpr double b41 = 0.3, b42 = -0.9, b43 = 1.2;
  static constexpr double b51 = -11.0 / 54.0, b52 = 2.5, b53 = -70.0 / 27.0,
                          b54 = 35.0 / 27.0;
  static constexpr double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0,
                          b63 = 575.0 / 13824.0, b64 = 44275.0 / 110592.0,
                          b65 = 253.0 / 4096.0;
  static constexpr double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0,
                          c6 = 512.0 / 1771.0;
  static constexpr double d1 = c1 - 2825.0 / 27648.0, d3 = c3 - 18575.0 / 48384.0,
                          d4 = c4 - 13525.0 / 55296.0, d5 = -277.0 / 14336.0,
                          d6 = c6 - 0.25;

  double t = t0;
  double h = (t1 - t0) / 64.0;
  int steps = 0;
  while (t < t1) {
    if (++steps > 2000000) throw std::runtime_error("ode oracle: too many steps");
    h = std::min(h, t1 - t);
    OdeState<N> k1 = rhs(t, y), yt;

    auto stage = [&](double frac, auto&&... terms) {
      for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (... + terms[i]);
      return rhs(t + frac * h, yt);
    };
    auto scaled = [&](double c, const OdeState<N>& k) {
      OdeState<N> r;
      for (std::size_t i = 0; i < N; ++i) r[i] = c * k[i];
      return r;
    };
    const OdeState<N> k2 = stage(a2, scaled(b21, k1));
    const OdeState<N> k3 = stage(a3, scaled(b31, k1), scaled(b32, k2));
    const OdeState<N> k4 = stage(a4, scaled(b41, k1), scaled(b42, k2), scaled(b43, k3));
    const OdeState<N> k5 =
        stage(a5, scaled(b51, k1), scaled(b52, k2), scaled(b53, k3), scaled(b54, k4));
    const OdeState<N> k6 = stage(a6, scaled(b61, k1), scaled(b62, k2), scaled(b63, k3),
                                 scaled(b64, k4), scaled(b65, k5));

    double err = 0.0;
    OdeState<N> ynew;
    for (std::size_t i = 0; i < N; ++i) {
      ynew[i] = y[i] + h * (c1 * k1[i] + c3 * k3[i] + c4 * k4[i] + c6 * k6[i]);
      const double ei =
          h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i]);
      const double scale = rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i])) + abs_tol +
                           1e-300;
      err = std::max(err, std::abs(ei) / scale);
    }
    if (err <= 1.0) {
      t += h;
      y = ynew;
      h *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-16), -0.2));
    } else {
      h *= std::max(0.1, 0.9 * std::pow(err, -0.25));
    }
  }
  return y;
}
