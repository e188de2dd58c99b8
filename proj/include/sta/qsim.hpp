#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "sta/eigensolver.hpp"
#include "sta/protocol.hpp"

namespace sta {

// Uniform spatial grid in the comoving/coexpanding frame coordinate
// sigma = (x - alpha)/rho. Half-open [x_min, x_max), n_points a power of two.
struct Grid {
  int n_points = 2048;
  double x_min = 0.0;
  double x_max = 0.0;

  double dx() const { return (x_max - x_min) / n_points; }
  double sigma(int j) const { return x_min + j * dx(); }
  double wavenumber(int j) const;  // FFT ordering
  void validate() const;

  // +-12 max(1, gamma) sqrt(hbar / m omega0)
  static Grid harmonic_default(const TrapSpec& trap, int n_points = 2048);
  static Grid centered(double center, double half_width, int n_points);
};

// Extra potential U(sigma) in joules on top of the (m/2) omega0^2 sigma^2
// term; an empty function means U = 0.
using Potential = std::function<double(double)>;

struct Eigensolution {
  std::vector<double> values;                // J, ascending
  std::vector<std::vector<double>> vectors;  // normalized in sigma
  Grid grid;
};

// Solves the stationary auxiliary problem
//   -(hbar^2/2m) phi'' + [(m/2) omega0^2 s^2 + U(s)] phi = lambda phi
// with Numerov-corrected finite differences and Dirichlet ends.
Eigensolution stationary_eigenstates(const Potential& U, const TrapSpec& trap,
                                     const Grid& grid, int n_states);

// Initial (or target) state: either a superposition of stationary eigenstates
// or an explicit wavefunction on the grid.
struct WaveState {
  std::vector<std::pair<int, std::complex<double>>> components;
  std::vector<std::complex<double>> psi;

  static WaveState eigenstate(int n) { return {{{n, {1.0, 0.0}}}, {}}; }
  static WaveState superposition(std::vector<std::pair<int, std::complex<double>>> c) {
    return {std::move(c), {}};
  }
  static WaveState wavefunction(std::vector<std::complex<double>> psi) {
    return {{}, std::move(psi)};
  }
  bool is_single_eigenstate() const { return psi.empty() && components.size() == 1; }
};

struct FrameParams {
  double alpha = 0.0, alpha_dot = 0.0, rho = 1.0, rho_dot = 0.0;
};

struct PropagationResult {
  std::vector<std::complex<double>> psi;  // frame wavefunction at t_f
  Grid grid;
  FrameParams frame;     // transformation parameters at t_f
  double t_f = 0.0;
  double global_phase = 0.0;  // accumulated purely time-dependent phase
  double lr_phase = 0.0;      // unwrapped eigenstate phase incl. global part; NaN unless single-n start
  double norm_error = 0.0;
  double edge_probability = 0.0;  // max boundary probability seen
  int n_steps = 0;
};

struct StepObserver {
  int stride = 0;  // 0: never called
  std::function<void(double t, const std::vector<std::complex<double>>& psi,
                     const FrameParams& frame)> fn;
};

// Largest step count obeying dt <= 0.02 * 2 pi / max(omega(t), hbar/(m dx^2)).
int default_step_count(const ProtocolControls& controls, const Grid& grid);

// Symmetric split-step spectral propagation of the comoving-frame
// Hamiltonian
//   H' = (1/rho^2) p^2/2m + Q(t) sigma^2 + L(t) sigma + U(sigma)/rho^2 + g(t)
// with Q = (m/2)(rho_dd rho + omega^2 rho^2) and
// L = rho (m alpha_dd + m omega^2 alpha - F); rho/alpha derivatives come from
// the trajectories, omega^2 and F from the sampled controls. For exactly
// inverse-engineered controls Q and L reduce to the static auxiliary
// Hamiltonian, so an invariant eigenstate is transferred exactly; any control
// error shows up as excitation. The purely time-dependent terms g(t) are
// tracked as an accumulated phase, never applied to psi.
PropagationResult propagate(const ProtocolControls& controls, const WaveState& initial,
                            const Grid& grid, int n_steps, const Potential& U = {},
                            const Eigensolution* eig = nullptr,
                            const StepObserver& observer = {});

// sigma-space moments of a frame wavefunction (momenta via FFT)
struct FrameMoments {
  double norm = 0.0;
  double sigma_mean = 0.0, sigma_sq = 0.0;
  double p_mean = 0.0, p_sq = 0.0;
  double sigma_p_sym = 0.0;  // <sigma p + p sigma>
};
FrameMoments frame_moments(const std::vector<std::complex<double>>& psi, const Grid& grid);

// Lab-frame observables reconstructed through the frame transformation:
// x = alpha + rho sigma, p = m alpha_dot + m rho_dot sigma + p_sigma / rho.
struct LabMoments {
  double mean_x = 0.0;
  double mean_v = 0.0;
  double velocity_dispersion = 0.0;
  double p_sq = 0.0;
};
LabMoments lab_moments(const FrameMoments& fm, const FrameParams& frame, double mass);

// <p^2/2m + (m/2) omega0^2 sigma^2 + U(sigma)>: the conserved invariant
// expectation of the lab-frame state, evaluated in the frame.
double invariant_expectation(const std::vector<std::complex<double>>& psi,
                             const Grid& grid, const TrapSpec& trap,
                             const Potential& U = {});

// Lab-frame <H>(t) from the frame state and the sampled controls.
double lab_energy(const std::vector<std::complex<double>>& psi, const Grid& grid,
                  const FrameParams& frame, const ProtocolControls& controls,
                  double t, const Potential& U = {});

// Closed-form average energy of the n-th dynamical mode of a harmonic
// protocol; the centroid kinetic term enters as (m/2) alpha_dot^2.
double energy_analytic(const ProtocolControls& controls, int n, double t);

// Final-state velocity dispersion of the n-th mode of a harmonic launching
// protocol, sqrt(hbar (2n+1)/(2 m omega0) (eps^2 + omega0^2/gamma^2)).
double launch_dispersion_analytic(const TrapSpec& trap, int n);

// Lewis-Riesenfeld phase by adaptive quadrature of the closed-form integrand
// -(1/hbar) [lambda_n / rho^2 + (m/2)(alpha_dot - alpha rho_dot/rho)^2
//            - (m/2) omega0^2 alpha^2 / rho^4].
double lewis_riesenfeld_phase(const ProtocolControls& controls, int n, double lambda_n);
double lewis_riesenfeld_phase(const ProtocolControls& controls, int n);  // harmonic

// int_0^t dt'/rho^2(t')
double scaled_time(const ProtocolControls& controls, double t);

struct LaunchStatistics {
  double fidelity = 0.0;
  double energy = 0.0;
  double mean_velocity = 0.0;
  double velocity_dispersion = 0.0;
  double lr_phase = 0.0;
};

// Fidelity is taken against the invariant eigenstate target expressed in the
// frame (phi_n dressed with the in-frame dynamical phases for superpositions).
LaunchStatistics launch_statistics(const PropagationResult& result,
                                   const WaveState& target,
                                   const ProtocolControls& controls,
                                   const Eigensolution& eig,
                                   const Potential& U = {});

}  // namespace sta
