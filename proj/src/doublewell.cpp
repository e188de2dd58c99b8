#include "sta/doublewell.hpp"

#include <algorithm>
#include <cmath>

#include "sta/constants.hpp"
#include "sta/errors.hpp"

namespace sta {

void DoubleWellParams::validate() const {
  if (!(mass > 0.0)) throw StaError("double-well mass must be positive");
  if (!(beta > 0.0)) throw NotDoubleWell("quartic coefficient beta must be positive");
  if (!(lambda < 0.0)) throw NotDoubleWell("quadratic coefficient lambda must be negative");
}

WellMinima well_minima(const DoubleWellParams& p) {
  p.validate();
  const double half = std::sqrt(-p.lambda / p.beta) / std::sqrt(2.0);
  const double shift = p.mu / (4.0 * p.lambda);
  return WellMinima{half + shift, -half + shift};
}

namespace {

double newton_root(const DoubleWellParams& p, double guess) {
  double x = guess;
  for (int i = 0; i < 80; ++i) {
    const double f = 4.0 * p.beta * x * x * x + 2.0 * p.lambda * x + p.mu;
    const double fd = 12.0 * p.beta * x * x + 2.0 * p.lambda;
    const double step = f / fd;
    x -= step;
    if (std::abs(step) < 1e-15 * (std::abs(x) + 1e-300)) break;
  }
  return x;
}

}  // namespace

WellMinima well_minima_exact(const DoubleWellParams& p) {
  const WellMinima approx = well_minima(p);
  return WellMinima{newton_root(p, approx.sigma_plus), newton_root(p, approx.sigma_minus)};
}

double barrier_position(const DoubleWellParams& p) {
  p.validate();
  return newton_root(p, -p.mu / (2.0 * p.lambda));
}

double effective_frequency(const DoubleWellParams& p) {
  p.validate();
  return 2.0 * std::sqrt(-p.lambda / p.mass);
}

DifferentialLaunchReport differential_launch(const DoubleWellParams& p, const TrapSpec& trap) {
  p.validate();
  const WellMinima wm = well_minima(p);
  DifferentialLaunchReport r;
  r.v_plus = trap.v_f + trap.epsilon * wm.sigma_plus;
  r.v_minus = trap.v_f + trap.epsilon * wm.sigma_minus;
  r.delta_v = std::sqrt(hbar / (4.0 * std::sqrt(-p.mass * p.lambda)) *
                        (trap.epsilon * trap.epsilon -
                         4.0 * p.lambda / (p.mass * trap.gamma * trap.gamma)));
  r.separated = (r.v_plus - r.v_minus) > 2.0 * r.delta_v;
  const double two_well_bound =
      4.0 * std::sqrt(2.0) / 3.0 * std::sqrt(-p.lambda * p.lambda * p.lambda / p.beta);
  r.two_well_validity_ok = std::abs(p.mu) <= 0.1 * two_well_bound;
  r.localization_bound_ok = std::abs(p.mu) < hbar * std::sqrt(2.0 * p.beta / p.mass);
  return r;
}

SimulationComparison verify_against_simulation(const DoubleWellParams& params,
                                               const TrapSpec& trap, double t_f,
                                               int n_points, int n_samples) {
  params.validate();
  trap.validate();
  if (trap.harmonic) throw StaError("double-well verification runs in arbitrary-trap mode");

  const ProtocolControls controls = build_controls(trap, t_f, n_samples);
  const Potential u = [params](double s) { return params.potential(s); };

  SimulationComparison out;
  out.analytic = differential_launch(params, trap);

  const WellMinima exact = well_minima_exact(params);
  auto run_well = [&](double center) {
    // window grid around one well; the frame state never leaves it
    const double curvature = 12.0 * params.beta * center * center + 2.0 * params.lambda;
    const double local_omega = std::sqrt(curvature / params.mass);
    const double width = std::sqrt(hbar / (params.mass * local_omega));
    const Grid grid = Grid::centered(center, 32.0 * width, n_points);
    const Eigensolution eig = stationary_eigenstates(u, trap, grid, 2);
    const PropagationResult prop =
        propagate(controls, WaveState::eigenstate(0), grid,
                  default_step_count(controls, grid), u, &eig);
    const LaunchStatistics stats =
        launch_statistics(prop, WaveState::eigenstate(0), controls, eig, u);
    WellSimulation w;
    w.mean_velocity = stats.mean_velocity;
    w.velocity_dispersion = stats.velocity_dispersion;
    w.fidelity = stats.fidelity;
    w.local_ground_energy = eig.values[0];
    return w;
  };

  out.left = run_well(exact.sigma_minus);
  out.right = run_well(exact.sigma_plus);
  out.ground_state_well = out.left.local_ground_energy <= out.right.local_ground_energy ? -1 : 1;

  auto rel_dev = [](double sim, double ref) { return std::abs(sim - ref) / std::abs(ref); };
  out.rel_dev_v_left = rel_dev(out.left.mean_velocity, out.analytic.v_minus);
  out.rel_dev_v_right = rel_dev(out.right.mean_velocity, out.analytic.v_plus);
  out.rel_dev_dv_left = rel_dev(out.left.velocity_dispersion, out.analytic.delta_v);
  out.rel_dev_dv_right = rel_dev(out.right.velocity_dispersion, out.analytic.delta_v);
  out.separated_simulated =
      (out.right.mean_velocity - out.left.mean_velocity) >
      (out.left.velocity_dispersion + out.right.velocity_dispersion);
  return out;
}

}  // namespace sta
