#pragma once

#include <functional>
#include <vector>

#include "sta/poly_bvp.hpp"

namespace sta {

// Physical description of one dual-task protocol. A harmonic trap has a
// nonzero initial frequency omega0 and controls (omega^2(t), x0(t)); an
// arbitrary trap (harmonic = false) has omega0 = 0 and controls
// (omega^2(t), F(t)) acting alongside the scaled potential term.
struct TrapSpec {
  double mass = 0.0;     // kg
  double omega0 = 0.0;   // rad/s, = omega(0) for harmonic traps
  double gamma = 1.0;    // final scaling factor, omega_f = omega0/gamma^2
  double d = 0.0;        // transport distance, m
  double v_f = 0.0;      // final launch velocity, m/s
  double epsilon = 0.0;  // final expansion velocity rho_dot(t_f), 1/s
  bool harmonic = true;

  void validate() const;
  double omega_f_sq() const;  // omega0^2 / gamma^4
};

struct ProtocolControls {
  std::vector<double> times;     // uniform grid over [0, t_f]
  std::vector<double> omega_sq;  // (rad/s)^2
  std::vector<double> x0;        // m, harmonic case (NaN where omega^2 ~ 0)
  std::vector<double> force;     // N
  PolynomialTrajectory rho;
  PolynomialTrajectory alpha;
  TrapSpec trap;
  double t_f = 0.0;

  int n_samples() const { return static_cast<int>(times.size()); }
  double sample_dt() const { return t_f / (static_cast<double>(times.size()) - 1.0); }

  // cubic interpolation of the sampled signals (the propagation path)
  double omega_sq_at(double t) const;
  double force_at(double t) const;
};

struct ConstraintReport {
  double min_omega_sq = 0.0;
  double x0_max = 0.0, x0_min = 0.0;
  double exceeded_distance = 0.0;  // x0_max - x0_min - d
  bool real_frequency_ok = false;
  bool box_ok = false;
};

// omega^2(t) from the scaling trajectory; may be negative (that sign is the
// feasibility signal). Throws NonPositiveRho if rho(t) <= 0.
double derive_omega_sq(const PolynomialTrajectory& rho, const TrapSpec& trap, double t);

// Trap-center position x0 = alpha_dd / omega^2 + alpha. Throws ZeroFrequency
// when |omega^2| < 1e-12 * omega_sq_scale (x0 is undefined at a frequency zero).
double derive_x0(const PolynomialTrajectory& alpha,
                 const std::function<double(double)>& omega_sq_at, double t,
                 double omega_sq_scale);

// Homogeneous force F = m(alpha_dd + omega^2 alpha) for arbitrary-trap mode.
double derive_force(const PolynomialTrajectory& alpha,
                    const std::function<double(double)>& omega_sq_at,
                    double mass, double t);

// Builds the boundary conditions implied by (gamma, d, v_f, epsilon, harmonic),
// solves the polynomial ansatzes and samples all control signals.
ProtocolControls build_controls(const TrapSpec& trap, double t_f, int n_samples);

// Refined extrema of omega^2(t) and x0(t) (grid + golden-section around each
// bracketed extremum) and the derived feasibility verdicts.
ConstraintReport check_constraints(const ProtocolControls& controls, double tol_box);

double default_box_tolerance(const TrapSpec& trap);  // 1e-9 * |d| + 1e-18 m

}  // namespace sta
