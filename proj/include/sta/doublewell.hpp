#pragma once

#include "sta/protocol.hpp"
#include "sta/qsim.hpp"

namespace sta {

// Quartic double well U(sigma) = beta sigma^4 + lambda sigma^2 + mu sigma
// in the frame coordinate; beta > 0, lambda < 0, mu biases the wells.
struct DoubleWellParams {
  double beta = 0.0;    // N/m^3
  double lambda = 0.0;  // N/m
  double mu = 0.0;      // N
  double mass = 0.0;    // kg

  double potential(double sigma) const {
    return ((beta * sigma * sigma + lambda) * sigma + mu) * sigma;
  }
  void validate() const;
};

struct WellMinima {
  double sigma_plus = 0.0;   // right well, m
  double sigma_minus = 0.0;  // left well, m
};

// Two-well approximation sigma_pm = +-sqrt(-lambda/beta)/sqrt(2) + mu/(4 lambda).
WellMinima well_minima(const DoubleWellParams& params);

// Exact stationary points of U (Newton-refined), for error budgets.
WellMinima well_minima_exact(const DoubleWellParams& params);
double barrier_position(const DoubleWellParams& params);  // middle root of U'

// Effective angular frequency of either well, 2 sqrt(-lambda/m).
double effective_frequency(const DoubleWellParams& params);

struct DifferentialLaunchReport {
  double v_plus = 0.0, v_minus = 0.0;  // per-well mean launch velocities, m/s
  double delta_v = 0.0;                // common dispersion, m/s
  bool separated = false;              // v_plus - v_minus > 2 delta_v
  bool two_well_validity_ok = false;   // |mu| <= 0.1 (4 sqrt2/3) sqrt(-lambda^3/beta)
  bool localization_bound_ok = false;  // |mu| < hbar sqrt(2 beta/m), evaluated literally
};

// v_pm = v_f + epsilon sigma_pm and
// delta_v = sqrt(hbar/(4 sqrt(-m lambda)) (eps^2 - 4 lambda/(m gamma^2))).
DifferentialLaunchReport differential_launch(const DoubleWellParams& params,
                                             const TrapSpec& trap);

struct WellSimulation {
  double mean_velocity = 0.0;
  double velocity_dispersion = 0.0;
  double fidelity = 0.0;
  double local_ground_energy = 0.0;
};

struct SimulationComparison {
  DifferentialLaunchReport analytic;
  WellSimulation left, right;
  int ground_state_well = 0;  // -1 left, +1 right (numerically determined)
  bool separated_simulated = false;
  double rel_dev_v_left = 0.0, rel_dev_v_right = 0.0;
  double rel_dev_dv_left = 0.0, rel_dev_dv_right = 0.0;
};

// Builds the arbitrary-trap protocol, propagates the local
// ground state of each well on a window grid centered on it, and compares the
// lab-frame velocity moments with the two-well formulas.
SimulationComparison verify_against_simulation(const DoubleWellParams& params,
                                               const TrapSpec& trap, double t_f,
                                               int n_points = 512,
                                               int n_samples = 4001);

}  // namespace sta
