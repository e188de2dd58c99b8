#include "sta/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "sta/constants.hpp"
#include "sta/errors.hpp"
#include "sta/fft.hpp"
#include "sta/num.hpp"

namespace sta {

namespace {

using cplx = std::complex<double>;

const Fft& fft_for(int n) {
  static std::mutex m;
  static std::map<int, std::unique_ptr<Fft>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Fft>(n);
  return *slot;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

double Grid::wavenumber(int j) const {
  const double dk = 2.0 * std::numbers::pi / (n_points * dx());
  return (j < n_points / 2) ? dk * j : dk * (j - n_points);
}

void Grid::validate() const {
  if (!is_power_of_two(n_points) || n_points < 16)
    throw StaError("grid n_points must be a power of two >= 16");
  if (!(x_max > x_min)) throw StaError("grid requires x_max > x_min");
}

Grid Grid::harmonic_default(const TrapSpec& trap, int n_points) {
  if (!(trap.omega0 > 0.0)) throw StaError("harmonic grid needs omega0 > 0");
  const double half =
      12.0 * std::max(1.0, trap.gamma) * std::sqrt(hbar / (trap.mass * trap.omega0));
  return Grid{n_points, -half, half};
}

Grid Grid::centered(double center, double half_width, int n_points) {
  return Grid{n_points, center - half_width, center + half_width};
}

Eigensolution stationary_eigenstates(const Potential& U, const TrapSpec& trap,
                                     const Grid& grid, int n_states) {
  grid.validate();
  const int n = grid.n_points;
  std::vector<double> v(n);
  for (int j = 0; j < n; ++j) {
    const double s = grid.sigma(j);
    v[j] = 0.5 * trap.mass * trap.omega0 * trap.omega0 * s * s + (U ? U(s) : 0.0);
  }
  TridiagonalEigenResult r = numerov_lowest_eigenpairs(v, grid.dx(), trap.mass, n_states);
  for (const auto& phi : r.vectors) {
    double peak = 0.0;
    for (double x : phi) peak = std::max(peak, std::abs(x));
    if (std::max(std::abs(phi.front()), std::abs(phi.back())) > 1e-8 * peak)
      throw InsufficientGrid("eigenstate amplitude at the grid edge exceeds 1e-8");
  }
  return Eigensolution{std::move(r.values), std::move(r.vectors), grid};
}

int default_step_count(const ProtocolControls& controls, const Grid& grid) {
  double w_max = 0.0;
  for (double w2 : controls.omega_sq) w_max = std::max(w_max, std::sqrt(std::max(w2, 0.0)));
  const double dxx = grid.dx();
  const double rate = std::max(w_max, hbar / (controls.trap.mass * dxx * dxx));
  const double dt_max = 0.02 * 2.0 * std::numbers::pi / rate;
  return std::max(16, static_cast<int>(std::ceil(controls.t_f / dt_max)));
}

PropagationResult propagate(const ProtocolControls& controls, const WaveState& initial,
                            const Grid& grid, int n_steps, const Potential& U,
                            const Eigensolution* eig, const StepObserver& observer) {
  grid.validate();
  const int n = grid.n_points;
  const double m = controls.trap.mass;
  const double t_f = controls.t_f;
  const double dt = t_f / n_steps;

  if (n_steps < default_step_count(controls, grid))
    throw CFLViolation("n_steps " + std::to_string(n_steps) + " below the resolution rule " +
                       std::to_string(default_step_count(controls, grid)));

  // initial wavefunction
  std::vector<cplx> psi(n, cplx{0.0, 0.0});
  if (!initial.psi.empty()) {
    if (static_cast<int>(initial.psi.size()) != n)
      throw StaError("initial wavefunction size does not match the grid");
    psi = initial.psi;
  } else {
    if (eig == nullptr) throw StaError("eigenstate initial state requires an Eigensolution");
    for (const auto& [idx, c] : initial.components) {
      if (idx < 0 || idx >= static_cast<int>(eig->vectors.size()))
        throw StaError("initial state index outside the eigensolution");
      for (int j = 0; j < n; ++j) psi[j] += c * eig->vectors[idx][j];
    }
  }
  const double dxx = grid.dx();
  {
    double norm = 0.0;
    for (const cplx& a : psi) norm += std::norm(a);
    norm = std::sqrt(norm * dxx);
    if (!(norm > 0.0)) throw StaError("initial state has zero norm");
    for (cplx& a : psi) a /= norm;
  }

  // cached grid arrays
  std::vector<double> sigma(n), u_pot(n, 0.0), kin_base(n);
  for (int j = 0; j < n; ++j) {
    sigma[j] = grid.sigma(j);
    if (U) u_pot[j] = U(sigma[j]);
    const double k = grid.wavenumber(j);
    kin_base[j] = -hbar * k * k * dt / (4.0 * m);
  }

  const bool track_phase = initial.psi.empty() && initial.is_single_eigenstate() && eig;
  const std::vector<double>* phi_track =
      track_phase ? &eig->vectors[initial.components.front().first] : nullptr;
  cplx overlap_prev{1.0, 0.0};
  if (track_phase) {
    cplx z{0.0, 0.0};
    for (int j = 0; j < n; ++j) z += (*phi_track)[j] * psi[j];
    overlap_prev = z * dxx;
  }

  const Fft& fft = fft_for(n);
  std::vector<cplx> kin_factor(n), pot_factor(n);
  std::vector<double> v_scratch(n);
  double global_phase = 0.0, lr_unwrapped = 0.0;
  double norm_error = 0.0, edge_prob = 0.0;

  auto sample_health = [&]() {
    double norm = 0.0;
    for (const cplx& a : psi) norm += std::norm(a);
    norm *= dxx;
    norm_error = std::max(norm_error, std::abs(norm - 1.0));
    if (norm_error > 1e-6)
      throw NormDrift("norm drifted by " + std::to_string(norm_error));
    edge_prob = std::max(edge_prob, (std::norm(psi[0]) + std::norm(psi[n - 1])) * dxx);
  };

  auto frame_at = [&](double t) {
    return FrameParams{controls.alpha.evaluate(t), controls.alpha.evaluate(t, 1),
                       controls.rho.evaluate(t), controls.rho.evaluate(t, 1)};
  };

  for (int step = 0; step < n_steps; ++step) {
    const double tm = (step + 0.5) * dt;
    const double rho = controls.rho.evaluate(tm);
    if (rho <= 0.0) throw NonPositiveRho("rho <= 0 during propagation");
    const double rho_d = controls.rho.evaluate(tm, 1);
    const double rho_dd = controls.rho.evaluate(tm, 2);
    const double al = controls.alpha.evaluate(tm);
    const double al_d = controls.alpha.evaluate(tm, 1);
    const double al_dd = controls.alpha.evaluate(tm, 2);
    const double w2 = controls.omega_sq_at(tm);
    const double force = controls.force_at(tm);

    const double q_coef = 0.5 * m * (rho_dd * rho + w2 * rho * rho);
    const double l_coef = rho * (m * al_dd + m * w2 * al - force);
    const double c2 = 0.5 * m * (rho_dd / rho + w2);
    const double c1 = m * al_dd - m * al * rho_dd / rho - force;
    const double g_term = c2 * al * al + c1 * al +
                          0.5 * m * (al * rho_d / rho - al_d) * (al * rho_d / rho - al_d);

    const double inv_r2 = 1.0 / (rho * rho);
    double v_min = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      v_scratch[j] = (q_coef * sigma[j] + l_coef) * sigma[j] + u_pot[j] * inv_r2;
      v_min = std::min(v_min, v_scratch[j]);
    }
    // the grid-minimum shift keeps per-step potential phases small; it is a
    // purely time-dependent term and joins the tracked global phase
    global_phase -= dt * (g_term + v_min) / hbar;

    for (int j = 0; j < n; ++j) {
      kin_factor[j] = std::polar(1.0, kin_base[j] * inv_r2);
      pot_factor[j] = std::polar(1.0, -dt * (v_scratch[j] - v_min) / hbar);
    }

    fft.forward(psi.data());
    for (int j = 0; j < n; ++j) psi[j] *= kin_factor[j];
    fft.inverse(psi.data());
    for (int j = 0; j < n; ++j) psi[j] *= pot_factor[j];
    fft.forward(psi.data());
    for (int j = 0; j < n; ++j) psi[j] *= kin_factor[j];
    fft.inverse(psi.data());

    if (track_phase) {
      cplx z{0.0, 0.0};
      for (int j = 0; j < n; ++j) z += (*phi_track)[j] * psi[j];
      z *= dxx;
      lr_unwrapped += std::arg(z * std::conj(overlap_prev));
      overlap_prev = z;
    }
    if ((step & 31) == 0) sample_health();
    if (observer.stride > 0 && observer.fn && ((step + 1) % observer.stride == 0)) {
      const double t = (step + 1) * dt;
      observer.fn(t, psi, frame_at(t));
    }
  }
  sample_health();

  PropagationResult out;
  out.psi = std::move(psi);
  out.grid = grid;
  out.frame = frame_at(t_f);
  out.t_f = t_f;
  out.global_phase = global_phase;
  out.lr_phase = track_phase ? lr_unwrapped + global_phase
                             : std::numeric_limits<double>::quiet_NaN();
  out.norm_error = norm_error;
  out.edge_probability = edge_prob;
  out.n_steps = n_steps;
  return out;
}

FrameMoments frame_moments(const std::vector<cplx>& psi, const Grid& grid) {
  const int n = grid.n_points;
  const double dxx = grid.dx();
  FrameMoments fm;
  for (int j = 0; j < n; ++j) {
    const double p = std::norm(psi[j]) * dxx;
    const double s = grid.sigma(j);
    fm.norm += p;
    fm.sigma_mean += s * p;
    fm.sigma_sq += s * s * p;
  }
  fm.sigma_mean /= fm.norm;
  fm.sigma_sq /= fm.norm;

  std::vector<cplx> hat = psi;
  const Fft& fft = fft_for(n);
  fft.forward(hat.data());
  double pm = 0.0, p2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double pk = std::norm(hat[j]) * dxx / n;
    const double hk = hbar * grid.wavenumber(j);
    pm += hk * pk;
    p2 += hk * hk * pk;
  }
  fm.p_mean = pm / fm.norm;
  fm.p_sq = p2 / fm.norm;

  // <sigma p + p sigma> = 2 Re <sigma p>, with p psi = -i hbar psi' and
  // psi' recovered spectrally
  for (int j = 0; j < n; ++j) hat[j] *= cplx{0.0, grid.wavenumber(j)};
  fft.inverse(hat.data());  // hat = psi'
  cplx sp{0.0, 0.0};
  for (int j = 0; j < n; ++j)
    sp += std::conj(psi[j]) * grid.sigma(j) * (cplx{0.0, -hbar} * hat[j]) * dxx;
  fm.sigma_p_sym = 2.0 * sp.real() / fm.norm;
  return fm;
}

LabMoments lab_moments(const FrameMoments& fm, const FrameParams& f, double mass) {
  LabMoments lm;
  lm.mean_x = f.alpha + f.rho * fm.sigma_mean;
  const double p_mean = mass * f.alpha_dot + mass * f.rho_dot * fm.sigma_mean + fm.p_mean / f.rho;
  lm.mean_v = p_mean / mass;
  lm.p_sq = mass * mass * f.alpha_dot * f.alpha_dot +
            mass * mass * f.rho_dot * f.rho_dot * fm.sigma_sq +
            fm.p_sq / (f.rho * f.rho) +
            2.0 * mass * mass * f.alpha_dot * f.rho_dot * fm.sigma_mean +
            2.0 * mass * f.alpha_dot * fm.p_mean / f.rho +
            mass * f.rho_dot / f.rho * fm.sigma_p_sym;
  const double var = std::max(lm.p_sq - p_mean * p_mean, 0.0);
  lm.velocity_dispersion = std::sqrt(var) / mass;
  return lm;
}

double invariant_expectation(const std::vector<cplx>& psi, const Grid& grid,
                             const TrapSpec& trap, const Potential& U) {
  const FrameMoments fm = frame_moments(psi, grid);
  double pot = 0.0;
  const double dxx = grid.dx();
  for (int j = 0; j < grid.n_points; ++j) {
    const double s = grid.sigma(j);
    const double v = 0.5 * trap.mass * trap.omega0 * trap.omega0 * s * s + (U ? U(s) : 0.0);
    pot += v * std::norm(psi[j]) * dxx;
  }
  return fm.p_sq / (2.0 * trap.mass) + pot / fm.norm;
}

double lab_energy(const std::vector<cplx>& psi, const Grid& grid, const FrameParams& f,
                  const ProtocolControls& controls, double t, const Potential& U) {
  const TrapSpec& trap = controls.trap;
  const FrameMoments fm = frame_moments(psi, grid);
  const LabMoments lm = lab_moments(fm, f, trap.mass);
  const double w2 = controls.omega_sq_at(t);
  const double x_sq = f.alpha * f.alpha + 2.0 * f.alpha * f.rho * fm.sigma_mean +
                      f.rho * f.rho * fm.sigma_sq;
  if (trap.harmonic) {
    // energy relative to the instantaneous trap minimum
    const double x0 = num::interp_cubic(controls.x0, 0.0, controls.sample_dt(), t);
    const double dev = x_sq - 2.0 * x0 * lm.mean_x + x0 * x0;
    return lm.p_sq / (2.0 * trap.mass) + 0.5 * trap.mass * w2 * dev;
  }
  double u_exp = 0.0;
  const double dxx = grid.dx();
  for (int j = 0; j < grid.n_points; ++j)
    u_exp += (U ? U(grid.sigma(j)) : 0.0) * std::norm(psi[j]) * dxx;
  u_exp /= fm.norm;
  const double force = controls.force_at(t);
  return lm.p_sq / (2.0 * trap.mass) - force * lm.mean_x + 0.5 * trap.mass * w2 * x_sq +
         u_exp / (f.rho * f.rho);
}

double energy_analytic(const ProtocolControls& controls, int n, double t) {
  const TrapSpec& trap = controls.trap;
  if (!trap.harmonic) throw StaError("closed-form energy applies to harmonic protocols");
  const double w0 = trap.omega0;
  const double rho = controls.rho.evaluate(t);
  const double rho_d = controls.rho.evaluate(t, 1);
  const double al_d = controls.alpha.evaluate(t, 1);
  const double al_dd = controls.alpha.evaluate(t, 2);
  const double w2 = derive_omega_sq(controls.rho, trap, t);
  const double mode = (2.0 * n + 1.0) * hbar / (4.0 * w0) *
                      (rho_d * rho_d + w2 * rho * rho + w0 * w0 / (rho * rho));
  // (alpha - x0) = -alpha_dd / omega^2
  const double dev = al_dd / w2;
  return mode + 0.5 * trap.mass * al_d * al_d + 0.5 * trap.mass * w2 * dev * dev;
}

double launch_dispersion_analytic(const TrapSpec& trap, int n) {
  const double w0 = trap.omega0;
  const double g = trap.gamma;
  return std::sqrt(hbar * (2.0 * n + 1.0) / (2.0 * trap.mass * w0) *
                   (trap.epsilon * trap.epsilon + w0 * w0 / (g * g)));
}

double scaled_time(const ProtocolControls& controls, double t) {
  return num::integrate(
      [&](double u) {
        const double r = controls.rho.evaluate(u);
        return 1.0 / (r * r);
      },
      0.0, t, 1e-12);
}

double lewis_riesenfeld_phase(const ProtocolControls& controls, int n, double lambda_n) {
  (void)n;
  const TrapSpec& trap = controls.trap;
  const double w0 = trap.harmonic ? trap.omega0 : 0.0;
  const double m = trap.mass;
  const double val = num::integrate(
      [&](double t) {
        const double r = controls.rho.evaluate(t);
        const double rd = controls.rho.evaluate(t, 1);
        const double a = controls.alpha.evaluate(t);
        const double ad = controls.alpha.evaluate(t, 1);
        const double rel = ad - a * rd / r;
        return lambda_n / (r * r) + 0.5 * m * rel * rel -
               0.5 * m * w0 * w0 * a * a / (r * r * r * r);
      },
      0.0, controls.t_f, 1e-12);
  return -val / hbar;
}

double lewis_riesenfeld_phase(const ProtocolControls& controls, int n) {
  if (!controls.trap.harmonic)
    throw StaError("analytic eigenvalues need the harmonic trap; pass lambda_n explicitly");
  return lewis_riesenfeld_phase(controls, n, hbar * controls.trap.omega0 * (n + 0.5));
}

LaunchStatistics launch_statistics(const PropagationResult& result, const WaveState& target,
                                   const ProtocolControls& controls, const Eigensolution& eig,
                                   const Potential& U) {
  const TrapSpec& trap = controls.trap;
  const double t_f = controls.t_f;

  // the state frame must be the end point of these controls
  auto close = [](double a, double b, double scale) {
    return std::abs(a - b) <= 1e-6 * scale;
  };
  const double v_scale = std::max({std::abs(trap.v_f), std::abs(trap.d) / t_f, 1e-12});
  if (!close(result.frame.rho, trap.gamma, trap.gamma) ||
      !close(result.frame.rho_dot, trap.epsilon, std::max(std::abs(trap.epsilon), 1.0 / t_f)) ||
      !close(result.frame.alpha, trap.d, std::max(std::abs(trap.d), 1e-12)) ||
      !close(result.frame.alpha_dot, trap.v_f, v_scale) || !close(result.t_f, t_f, t_f))
    throw FrameMismatch("state frame parameters disagree with the controls' end point");

  const Grid& grid = result.grid;
  const int n = grid.n_points;

  // ideal final state in the frame: phi_n dressed with the in-frame phases
  std::vector<cplx> ideal(n, cplx{0.0, 0.0});
  if (!target.psi.empty()) {
    if (static_cast<int>(target.psi.size()) != n)
      throw StaError("target wavefunction size does not match the grid");
    ideal = target.psi;
  } else {
    const double tau = scaled_time(controls, t_f);
    for (const auto& [idx, c] : target.components) {
      if (idx < 0 || idx >= static_cast<int>(eig.vectors.size()))
        throw StaError("target state index outside the eigensolution");
      const cplx phase = std::polar(1.0, -eig.values[idx] * tau / hbar);
      for (int j = 0; j < n; ++j) ideal[j] += c * phase * eig.vectors[idx][j];
    }
  }
  double n_ideal = 0.0, n_psi = 0.0;
  cplx overlap{0.0, 0.0};
  for (int j = 0; j < n; ++j) {
    n_ideal += std::norm(ideal[j]);
    n_psi += std::norm(result.psi[j]);
    overlap += std::conj(ideal[j]) * result.psi[j];
  }
  const double fidelity = std::norm(overlap) / (n_ideal * n_psi);

  const FrameMoments fm = frame_moments(result.psi, grid);
  const LabMoments lm = lab_moments(fm, result.frame, trap.mass);

  LaunchStatistics out;
  out.fidelity = fidelity;
  out.energy = lab_energy(result.psi, grid, result.frame, controls, t_f, U);
  out.mean_velocity = lm.mean_v;
  out.velocity_dispersion = lm.velocity_dispersion;
  out.lr_phase = result.lr_phase;
  return out;
}

}  // namespace sta
