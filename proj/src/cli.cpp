#include "sta/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sta/constants.hpp"
#include "sta/doublewell.hpp"
#include "sta/errors.hpp"
#include "sta/qsim.hpp"
#include "sta/scenario.hpp"
#include "sta/timing.hpp"

namespace sta::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StaError("cannot write " + path);
  out << text;
}

ordered_json trap_json(const TrapSpec& t) {
  return ordered_json{{"mass_kg", t.mass},       {"omega0_rad_s", t.omega0},
                      {"gamma", t.gamma},        {"d_m", t.d},
                      {"v_f_m_s", t.v_f},        {"epsilon_per_s", t.epsilon},
                      {"harmonic", t.harmonic}};
}

ordered_json report_json(const ConstraintReport& r) {
  return ordered_json{{"min_omega_sq", r.min_omega_sq},
                      {"x0_max_m", r.x0_max},
                      {"x0_min_m", r.x0_min},
                      {"exceeded_distance_m", r.exceeded_distance},
                      {"real_frequency_ok", r.real_frequency_ok},
                      {"box_ok", r.box_ok}};
}

bool scenario_feasible(const Scenario& sc, const ConstraintReport& r) {
  bool ok = true;
  if (sc.constraints.real_frequency) ok = ok && r.real_frequency_ok;
  if (sc.constraints.box) ok = ok && r.box_ok;
  return ok;
}

std::string design_csv(const ProtocolControls& c) {
  std::ostringstream out;
  out << "t_s,omega_sq,omega_real_or_nan,x0_m,F_N,rho,alpha_m\r\n";
  for (int i = 0; i < c.n_samples(); ++i) {
    const double w2 = c.omega_sq[i];
    const double w = w2 >= 0.0 ? std::sqrt(w2) : std::numeric_limits<double>::quiet_NaN();
    const double t = c.times[i];
    out << fmt(t) << ',' << fmt(w2) << ',' << fmt(w) << ',' << fmt(c.x0[i]) << ','
        << fmt(c.force[i]) << ',' << fmt(c.rho.evaluate(t)) << ','
        << fmt(c.alpha.evaluate(t)) << "\r\n";
  }
  return out.str();
}

DoubleWellParams preset_params(const std::string& preset, double mass) {
  DoubleWellParams p;
  p.beta = 5.2e-3;
  p.mu = 86.4e-21;
  p.mass = mass;
  if (preset == "fig3") p.lambda = -8.7e-12;
  else if (preset == "fig4") p.lambda = -4.7e-12;
  else throw ScenarioError("unknown doublewell preset \"" + preset + "\"");
  return p;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

// reconstructs a ProtocolControls from a design output pair (base.csv holds
// the sampled signals, base.json the trap and trajectory coefficients)
ProtocolControls load_controls(const std::string& base) {
  std::ifstream meta_in(base + ".json");
  if (!meta_in) throw ScenarioError("cannot open controls sidecar " + base + ".json");
  json meta;
  try {
    meta = json::parse(meta_in);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("controls sidecar is not valid JSON: ") + e.what());
  }

  ProtocolControls c;
  try {
    const json& t = meta.at("trap");
    c.trap.mass = t.at("mass_kg").get<double>();
    c.trap.omega0 = t.at("omega0_rad_s").get<double>();
    c.trap.gamma = t.at("gamma").get<double>();
    c.trap.d = t.at("d_m").get<double>();
    c.trap.v_f = t.at("v_f_m_s").get<double>();
    c.trap.epsilon = t.at("epsilon_per_s").get<double>();
    c.trap.harmonic = t.at("harmonic").get<bool>();
    c.t_f = meta.at("t_f_s").get<double>();
    c.rho.coefficients = meta.at("rho_coefficients").get<std::vector<double>>();
    c.alpha.coefficients = meta.at("alpha_coefficients").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("controls sidecar is incomplete: ") + e.what());
  }
  c.rho.t_f = c.alpha.t_f = c.t_f;
  c.rho.kind = TrajectoryKind::rho;
  c.alpha.kind = TrajectoryKind::alpha;

  std::ifstream csv(base + ".csv", std::ios::binary);
  if (!csv) throw ScenarioError("cannot open controls table " + base + ".csv");
  std::string line;
  if (!std::getline(csv, line)) throw ScenarioError("controls table is empty");
  while (std::getline(csv, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 7) throw ScenarioError("controls table row has wrong field count");
    c.times.push_back(std::stod(f[0]));
    c.omega_sq.push_back(std::stod(f[1]));
    c.x0.push_back(std::stod(f[3]));
    c.force.push_back(std::stod(f[4]));
  }
  if (c.times.size() < 2) throw ScenarioError("controls table has too few rows");
  return c;
}

Grid scenario_grid(const Scenario& sc, const ProtocolControls& controls) {
  int n_points = sc.simulation.n_points > 0 ? sc.simulation.n_points : 2048;
  if (sc.doublewell) {
    const DoubleWellParams& p = *sc.doublewell;
    const WellMinima wm = well_minima_exact(p);
    // window on the deeper well
    const double center =
        p.potential(wm.sigma_minus) <= p.potential(wm.sigma_plus) ? wm.sigma_minus
                                                                  : wm.sigma_plus;
    const double curvature = 12.0 * p.beta * center * center + 2.0 * p.lambda;
    const double width = std::sqrt(hbar / (p.mass * std::sqrt(curvature / p.mass)));
    const double half = sc.simulation.box_half_width > 0.0 ? sc.simulation.box_half_width
                                                           : 32.0 * width;
    if (sc.simulation.n_points <= 0) n_points = 512;
    return Grid::centered(center, half, n_points);
  }
  if (sc.simulation.box_half_width > 0.0)
    return Grid::centered(0.0, sc.simulation.box_half_width, n_points);
  return Grid::harmonic_default(controls.trap, n_points);
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const StaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int sweep_thread_count() {
  if (const char* env = std::getenv("STA_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

int cmd_design(const std::string& scenario_path, const std::string& out_base) {
  return run_guarded([&]() -> int {
    const Scenario sc = load_scenario(scenario_path);
    const ProtocolControls controls = build_controls(sc.trap, sc.t_f, sc.n_samples);
    const double tol_box = sc.constraints.tol_box >= 0.0 ? sc.constraints.tol_box
                                                         : default_box_tolerance(sc.trap);
    const ConstraintReport report = check_constraints(controls, tol_box);
    const bool feasible = scenario_feasible(sc, report);

    write_file(out_base + ".csv", design_csv(controls));
    ordered_json meta{{"schema_version", "1"},
                      {"kind", "controls"},
                      {"trap", trap_json(sc.trap)},
                      {"t_f_s", sc.t_f},
                      {"n_samples", sc.n_samples},
                      {"rho_coefficients", controls.rho.coefficients},
                      {"alpha_coefficients", controls.alpha.coefficients},
                      {"constraint_report", report_json(report)},
                      {"feasible", feasible}};
    write_file(out_base + ".json", meta.dump(2) + "\n");

    std::cout << "designed protocol: t_f = " << sc.t_f * 1e6 << " us, "
              << controls.n_samples() << " samples\n"
              << "  min omega^2     = " << report.min_omega_sq << " (rad/s)^2"
              << (report.real_frequency_ok ? "" : "  [imaginary frequency]") << "\n"
              << "  trap center     = [" << report.x0_min * 1e6 << ", "
              << report.x0_max * 1e6 << "] um"
              << (report.box_ok ? "" : "  [outside box]") << "\n"
              << "  exceeded x_e    = " << report.exceeded_distance * 1e6 << " um\n"
              << "  wrote " << out_base << ".csv, " << out_base << ".json\n";
    return feasible ? 0 : 2;
  });
}

int cmd_mintime(const std::string& scenario_path, const std::string& constraint,
                bool json_output) {
  return run_guarded([&]() -> int {
    const Scenario sc = load_scenario(scenario_path);
    MinTimeQuery q;
    q.trap = sc.trap;
    q.tol_box = sc.constraints.tol_box;
    if (constraint == "freq") q.constraint = Constraint::real_frequency;
    else if (constraint == "box") q.constraint = Constraint::box;
    else if (constraint == "both") q.constraint = Constraint::both;
    else throw ScenarioError("constraint must be freq|box|both");

    double t_star = 0.0;
    bool unconstrained = false;
    try {
      t_star = minimal_time(q);
    } catch (const InvalidBracket& e) {
      if (std::string(e.what()).find("no constraint binds") == std::string::npos) throw;
      unconstrained = true;  // feasible down to the bracket floor
      t_star = 0.5 * analytic_bound(sc.trap) + 1e-9;
    }

    if (json_output) {
      ordered_json out{{"minimal_time_s", unconstrained ? 0.0 : t_star},
                       {"constraint", constraint},
                       {"rel_tol", q.rel_tol},
                       {"unconstrained", unconstrained}};
      std::cout << out.dump(2) << "\n";
    } else if (unconstrained) {
      std::cout << "minimal time: 0 (constraint never binds above the bracket floor "
                << t_star * 1e6 << " us)\n";
    } else {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.4g", t_star * 1e6);
      std::cout << "minimal time: " << buf << " us\n";
    }
    return 0;
  });
}

int cmd_verify(const std::string& scenario_path, const VerifyOptions& options) {
  return run_guarded([&]() -> int {
    const Scenario sc = load_scenario(scenario_path);
    ProtocolControls controls;
    if (!options.controls_base.empty())
      controls = load_controls(options.controls_base);
    else
      controls = build_controls(sc.trap, sc.t_f, sc.n_samples);

    std::vector<int> states;
    {
      std::stringstream ss(options.states);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        states.push_back(std::stoi(tok));
      }
      if (states.empty()) throw ScenarioError("no states requested");
    }
    const int n_states = *std::max_element(states.begin(), states.end()) + 1;

    Potential u;
    if (sc.doublewell) {
      const DoubleWellParams p = *sc.doublewell;
      u = [p](double s) { return p.potential(s); };
    }
    const Grid grid = scenario_grid(sc, controls);
    const Eigensolution eig = stationary_eigenstates(u, controls.trap, grid, n_states);
    const int n_steps = sc.simulation.n_steps > 0 ? sc.simulation.n_steps
                                                  : default_step_count(controls, grid);

    ordered_json statistics = ordered_json::array();
    std::string snapshot_csv = "t_s,sigma_m,re,im\r\n";
    bool all_pass = true;
    for (int n : states) {
      StepObserver obs;
      std::ostringstream snap;
      if (options.snapshots > 0) {
        obs.stride = std::max(1, n_steps / options.snapshots);
        obs.fn = [&](double t, const std::vector<std::complex<double>>& psi,
                     const FrameParams&) {
          for (int j = 0; j < grid.n_points; ++j)
            snap << fmt(t) << ',' << fmt(grid.sigma(j)) << ',' << fmt(psi[j].real()) << ','
                 << fmt(psi[j].imag()) << "\r\n";
        };
      }
      const PropagationResult prop =
          propagate(controls, WaveState::eigenstate(n), grid, n_steps, u, &eig, obs);
      const LaunchStatistics stats =
          launch_statistics(prop, WaveState::eigenstate(n), controls, eig, u);
      all_pass = all_pass && stats.fidelity >= options.fidelity_threshold;
      statistics.push_back(ordered_json{{"state", n},
                                        {"fidelity", stats.fidelity},
                                        {"mean_velocity_m_s", stats.mean_velocity},
                                        {"velocity_dispersion_m_s", stats.velocity_dispersion},
                                        {"energy_J", stats.energy},
                                        {"lr_phase_rad", stats.lr_phase},
                                        {"norm_error", prop.norm_error},
                                        {"edge_probability", prop.edge_probability}});
      std::cout << "state " << n << ": fidelity = " << stats.fidelity
                << ", <v> = " << stats.mean_velocity << " m/s, dv = "
                << stats.velocity_dispersion << " m/s\n";
      snapshot_csv += snap.str();
    }

    ordered_json out{{"schema_version", "1"},
                     {"kind", "verification"},
                     {"fidelity_threshold", options.fidelity_threshold},
                     {"grid", ordered_json{{"n_points", grid.n_points},
                                           {"x_min_m", grid.x_min},
                                           {"x_max_m", grid.x_max}}},
                     {"n_steps", n_steps},
                     {"statistics", statistics}};
    if (!options.out_path.empty()) {
      write_file(options.out_path, out.dump(2) + "\n");
      if (options.snapshots > 0) {
        const std::string snap_path = options.out_path + ".psi.csv";
        write_file(snap_path, snapshot_csv);
        std::cout << "wrote " << snap_path << "\n";
      }
      std::cout << "wrote " << options.out_path << "\n";
    }
    return all_pass ? 0 : 3;
  });
}

int cmd_sweep(const std::string& scenario_path, const std::string& mode,
              const std::string& out_path) {
  return run_guarded([&]() -> int {
    const Scenario sc = load_scenario(scenario_path);
    SweepMode m;
    if (mode == "dual") m = SweepMode::dual;
    else if (mode == "sequential") m = SweepMode::sequential;
    else throw ScenarioError("mode must be dual|sequential");

    const std::vector<double> grid = default_sweep_grid(sc.trap);
    const SweepResult result =
        sweep_exceeded_distance(sc.trap, m, grid, sweep_thread_count());

    std::ostringstream csv;
    csv << "t_f_us,xe_over_d\r\n";
    for (std::size_t i = 0; i < result.t_f.size(); ++i)
      csv << fmt(result.t_f[i] * 1e6) << ',' << fmt(result.value[i]) << "\r\n";
    write_file(out_path, csv.str());

    const auto [mn, mx] = std::minmax_element(result.value.begin(), result.value.end());
    std::cout << mode << " sweep over [" << result.t_f.front() * 1e6 << ", "
              << result.t_f.back() * 1e6 << "] us: xe/d in [" << *mn << ", " << *mx
              << "]\nwrote " << out_path << "\n";
    return 0;
  });
}

int cmd_doublewell(const std::string& scenario_path, const DoublewellOptions& options) {
  return run_guarded([&]() -> int {
    Scenario sc = load_scenario(scenario_path);
    if (!options.preset.empty())
      sc.doublewell = preset_params(options.preset, sc.trap.mass);
    if (!sc.doublewell)
      throw ScenarioError("doublewell command needs a \"doublewell\" object or --preset");
    const DoubleWellParams params = *sc.doublewell;

    const DifferentialLaunchReport report = differential_launch(params, sc.trap);
    const ProtocolControls controls = build_controls(sc.trap, sc.t_f, sc.n_samples);

    ordered_json out{{"schema_version", "1"},
                     {"kind", "doublewell_launch"},
                     {"preset", options.preset.empty() ? "custom" : options.preset},
                     {"params", ordered_json{{"beta_N_m3", params.beta},
                                             {"lambda_N_m", params.lambda},
                                             {"mu_N", params.mu},
                                             {"mass_kg", params.mass}}},
                     {"trap", trap_json(sc.trap)},
                     {"t_f_s", sc.t_f},
                     {"report", ordered_json{{"v_plus_m_s", report.v_plus},
                                             {"v_minus_m_s", report.v_minus},
                                             {"delta_v_m_s", report.delta_v},
                                             {"separated", report.separated},
                                             {"two_well_validity_ok", report.two_well_validity_ok},
                                             {"localization_bound_ok", report.localization_bound_ok}}}};

    if (options.simulate) {
      const SimulationComparison cmp =
          verify_against_simulation(params, sc.trap, sc.t_f,
                                    sc.simulation.n_points > 0 ? sc.simulation.n_points : 512,
                                    sc.n_samples);
      out["simulation"] = ordered_json{
          {"v_left_m_s", cmp.left.mean_velocity},
          {"v_right_m_s", cmp.right.mean_velocity},
          {"dv_left_m_s", cmp.left.velocity_dispersion},
          {"dv_right_m_s", cmp.right.velocity_dispersion},
          {"fidelity_left", cmp.left.fidelity},
          {"fidelity_right", cmp.right.fidelity},
          {"ground_state_well", cmp.ground_state_well == -1 ? "left" : "right"},
          {"separated", cmp.separated_simulated},
          {"rel_dev_v", std::max(cmp.rel_dev_v_left, cmp.rel_dev_v_right)},
          {"rel_dev_dv", std::max(cmp.rel_dev_dv_left, cmp.rel_dev_dv_right)}};
    }
    write_file(options.out_base + "_report.json", out.dump(2) + "\n");

    // trap-center trajectory, scaled by the transport distance
    std::ostringstream alpha_csv;
    alpha_csv << "t_us,alpha_over_d\r\n";
    for (int i = 0; i <= 500; ++i) {
      const double t = sc.t_f * i / 500.0;
      alpha_csv << fmt(t * 1e6) << ',' << fmt(controls.alpha.evaluate(t) / sc.trap.d)
                << "\r\n";
    }
    write_file(options.out_base + "_alpha.csv", alpha_csv.str());

    // potential snapshots at nine uniformly spaced times, each shifted so the
    // left-well minimum sits at zero
    const WellMinima wm = well_minima_exact(params);
    const double span =
        3.0 * sc.trap.gamma * std::max(std::abs(wm.sigma_plus), std::abs(wm.sigma_minus)) /
        std::abs(sc.trap.d);
    for (int k = 0; k < 9; ++k) {
      const double t = sc.t_f * k / 8.0;
      const double rho = controls.rho.evaluate(t);
      const double w2 = derive_omega_sq(controls.rho, sc.trap, t);
      const double force = derive_force(
          controls.alpha, [&](double tt) { return derive_omega_sq(controls.rho, sc.trap, tt); },
          sc.trap.mass, t);
      const double alpha = controls.alpha.evaluate(t);
      auto v_total = [&](double rel) {  // rel = (x - alpha)/d
        const double x = alpha + rel * sc.trap.d;
        return -force * x + 0.5 * sc.trap.mass * w2 * x * x +
               params.potential((x - alpha) / rho) / (rho * rho);
      };
      const double v_left = v_total(rho * wm.sigma_minus / sc.trap.d);
      std::ostringstream pot_csv;
      pot_csv << "x_minus_alpha_over_d,V_J\r\n";
      for (int j = 0; j <= 1000; ++j) {
        const double rel = -span + 2.0 * span * j / 1000.0;
        pot_csv << fmt(rel) << ',' << fmt(v_total(rel) - v_left) << "\r\n";
      }
      write_file(options.out_base + "_potential_" + std::to_string(k) + ".csv",
                 pot_csv.str());
    }

    std::cout << "v+ = " << report.v_plus << " m/s, v- = " << report.v_minus
              << " m/s, dv = " << report.delta_v << " m/s, separated = "
              << (report.separated ? "yes" : "no") << "\nwrote " << options.out_base
              << "_report.json, _alpha.csv, _potential_[0-8].csv\n";
    return 0;
  });
}

}  // namespace sta::cli
