#include "sta/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sta/errors.hpp"
#include "sta/num.hpp"

namespace sta {

void TrapSpec::validate() const {
  if (!(mass > 0.0)) throw StaError("trap mass must be positive");
  if (omega0 < 0.0) throw StaError("omega0 must be non-negative");
  if (!(gamma > 0.0)) throw StaError("gamma must be positive");
  if (harmonic && !(omega0 > 0.0))
    throw StaError("harmonic trap requires omega0 > 0");
  if (!harmonic && omega0 != 0.0)
    throw StaError("arbitrary-trap mode requires omega0 = 0");
}

double TrapSpec::omega_f_sq() const {
  const double g2 = gamma * gamma;
  return omega0 * omega0 / (g2 * g2);
}

double ProtocolControls::omega_sq_at(double t) const {
  return num::interp_cubic(omega_sq, 0.0, sample_dt(), t);
}

double ProtocolControls::force_at(double t) const {
  return num::interp_cubic(force, 0.0, sample_dt(), t);
}

double derive_omega_sq(const PolynomialTrajectory& rho, const TrapSpec& trap, double t) {
  const double r = rho.evaluate(t);
  if (r <= 0.0) throw NonPositiveRho("rho(t) <= 0 at t = " + std::to_string(t));
  const double w0 = trap.harmonic ? trap.omega0 : 0.0;
  const double r2 = r * r;
  return w0 * w0 / (r2 * r2) - rho.evaluate(t, 2) / r;
}

double derive_x0(const PolynomialTrajectory& alpha,
                 const std::function<double(double)>& omega_sq_at, double t,
                 double omega_sq_scale) {
  const double w2 = omega_sq_at(t);
  if (std::abs(w2) < 1e-12 * omega_sq_scale)
    throw ZeroFrequency("x0 undefined: |omega^2| below threshold at t = " + std::to_string(t));
  return alpha.evaluate(t, 2) / w2 + alpha.evaluate(t);
}

double derive_force(const PolynomialTrajectory& alpha,
                    const std::function<double(double)>& omega_sq_at,
                    double mass, double t) {
  return mass * (alpha.evaluate(t, 2) + omega_sq_at(t) * alpha.evaluate(t));
}

ProtocolControls build_controls(const TrapSpec& trap, double t_f, int n_samples) {
  trap.validate();
  if (!(t_f > 0.0)) throw OutOfDomain("t_f must be positive");
  if (n_samples < 2) throw OutOfDomain("n_samples must be at least 2");

  BoundarySpec rho_spec;
  rho_spec.value0 = 1.0;
  rho_spec.valuef = trap.gamma;
  rho_spec.deriv1_f = trap.epsilon;
  int rho_order = 5;
  if (trap.harmonic && trap.epsilon != 0.0) {
    // terminal expansion velocity: third-derivative conditions keep the trap's
    // own scaling factor and the dynamical one tangent at the end points
    rho_spec.deriv3_0 = rho_spec.deriv3_f = 0.0;
    rho_order = 7;
  }

  BoundarySpec alpha_spec;
  alpha_spec.valuef = trap.d;
  alpha_spec.deriv1_f = trap.v_f;
  int alpha_order = 5;
  if (trap.harmonic && trap.v_f != 0.0) {
    // launching: match trap and wave-packet velocities at the boundary times
    alpha_spec.deriv3_0 = alpha_spec.deriv3_f = 0.0;
    alpha_order = 7;
  }

  ProtocolControls c;
  c.rho = solve_ansatz(rho_spec, rho_order, t_f, TrajectoryKind::rho);
  c.alpha = solve_ansatz(alpha_spec, alpha_order, t_f, TrajectoryKind::alpha);
  c.trap = trap;
  c.t_f = t_f;

  if (!trajectory_positive(c.rho))
    throw NonPositiveRho("scaling trajectory is not positive on [0, t_f]");

  const double w2_scale = trap.harmonic ? trap.omega0 * trap.omega0 : 1.0;
  c.times.resize(n_samples);
  c.omega_sq.resize(n_samples);
  c.x0.assign(n_samples, std::numeric_limits<double>::quiet_NaN());
  c.force.resize(n_samples);
  auto w2_at = [&](double t) { return derive_omega_sq(c.rho, trap, t); };
  for (int i = 0; i < n_samples; ++i) {
    const double t = t_f * static_cast<double>(i) / (n_samples - 1);
    c.times[i] = t;
    c.omega_sq[i] = w2_at(t);
    c.force[i] = derive_force(c.alpha, w2_at, trap.mass, t);
    if (trap.harmonic) {
      try {
        c.x0[i] = derive_x0(c.alpha, w2_at, t, w2_scale);
      } catch (const ZeroFrequency&) {
        // a sample landed on a frequency zero; keep NaN, the constraint
        // checker treats it as a box violation
      }
    }
  }
  return c;
}

namespace {

struct Extrema {
  double min_value, max_value;
};

// dense scan plus golden-section refinement around every bracketed extremum
Extrema refined_extrema(const std::function<double(double)>& f, double t_f, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = f(t_f * static_cast<double>(i) / (n - 1));
  Extrema e{v[0], v[0]};
  auto consider = [&](double x) {
    if (std::isnan(x)) return;
    e.min_value = std::min(e.min_value, x);
    e.max_value = std::max(e.max_value, x);
  };
  for (double x : v) consider(x);
  const double dt = t_f / (n - 1);
  for (int i = 1; i + 1 < n; ++i) {
    if (std::isnan(v[i - 1]) || std::isnan(v[i]) || std::isnan(v[i + 1])) continue;
    const double a = (i - 1) * dt, b = (i + 1) * dt;
    if (v[i] <= v[i - 1] && v[i] <= v[i + 1])
      consider(f(num::golden_min(f, a, b, 1e-6)));
    if (v[i] >= v[i - 1] && v[i] >= v[i + 1])
      consider(f(num::golden_min([&](double t) { return -f(t); }, a, b, 1e-6)));
  }
  return e;
}

}  // namespace

ConstraintReport check_constraints(const ProtocolControls& controls, double tol_box) {
  const TrapSpec& trap = controls.trap;
  const double t_f = controls.t_f;
  const int n = std::max(controls.n_samples(), 2001);

  auto w2_exact = [&](double t) { return derive_omega_sq(controls.rho, trap, t); };
  const Extrema w2 = refined_extrema(w2_exact, t_f, n);

  const double w2_scale = trap.harmonic ? trap.omega0 * trap.omega0
                                        : std::max(std::abs(w2.min_value), std::abs(w2.max_value));

  // in arbitrary-trap mode the box constraint applies to the moving center of
  // the potential term, which is alpha itself
  bool x0_nan = false;
  auto x0_exact = [&](double t) -> double {
    if (!trap.harmonic) return controls.alpha.evaluate(t);
    try {
      return derive_x0(controls.alpha, w2_exact, t, w2_scale);
    } catch (const ZeroFrequency&) {
      x0_nan = true;
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  const Extrema x0 = refined_extrema(x0_exact, t_f, n);

  ConstraintReport r;
  r.min_omega_sq = w2.min_value;
  r.x0_min = x0.min_value;
  r.x0_max = x0.max_value;
  r.exceeded_distance = x0.max_value - x0.min_value - trap.d;
  r.real_frequency_ok = w2.min_value >= -1e-12 * w2_scale;
  r.box_ok = !x0_nan && x0.min_value >= -tol_box && x0.max_value <= trap.d + tol_box;
  return r;
}

double default_box_tolerance(const TrapSpec& trap) {
  return 1e-9 * std::abs(trap.d) + 1e-18;
}

}  // namespace sta
