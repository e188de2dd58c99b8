#include "sta/timing.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "sta/errors.hpp"

namespace sta {

namespace {

bool feasible(const TrapSpec& trap, double t_f, Constraint constraint, double tol_box) {
  ProtocolControls controls;
  try {
    controls = build_controls(trap, t_f, 1001);
  } catch (const NonPositiveRho&) {
    return false;
  }
  const ConstraintReport r = check_constraints(controls, tol_box);
  switch (constraint) {
    case Constraint::real_frequency: return r.real_frequency_ok;
    case Constraint::box: return r.box_ok;
    case Constraint::both: return r.real_frequency_ok && r.box_ok;
  }
  return false;
}

double bisect(const TrapSpec& trap, Constraint constraint, double lo, double hi,
              double rel_tol, double tol_box) {
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(trap, mid, constraint, tol_box))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double analytic_bound(const TrapSpec& trap) {
  if (trap.gamma <= 1.0) return 0.0;
  if (!(trap.omega0 > 0.0)) throw StaError("analytic bound requires omega0 > 0");
  return std::sqrt(trap.gamma * trap.gamma - 1.0) / trap.omega0;
}

double minimal_time(const MinTimeQuery& query) {
  const TrapSpec& trap = query.trap;
  trap.validate();
  if (!(trap.omega0 > 0.0))
    throw StaError("minimal_time requires a harmonic trap with omega0 > 0");
  const double tol_box = query.tol_box >= 0.0 ? query.tol_box : default_box_tolerance(trap);

  double lo = query.t_lo, hi = query.t_hi;
  if (lo <= 0.0 && hi <= 0.0) {
    lo = 0.5 * analytic_bound(trap) + 1e-9;
    hi = 100.0 * trap.gamma * trap.gamma / trap.omega0;
  }
  if (!(lo < hi)) throw InvalidBracket("bracket requires t_lo < t_hi");

  bool f_lo = feasible(trap, lo, query.constraint, tol_box);
  bool f_hi = feasible(trap, hi, query.constraint, tol_box);
  if (f_lo || !f_hi) {
    // one widening attempt before giving up
    if (f_lo) lo *= 0.25;
    if (!f_hi) hi *= 4.0;
    f_lo = feasible(trap, lo, query.constraint, tol_box);
    f_hi = feasible(trap, hi, query.constraint, tol_box);
    if (f_lo && f_hi)
      throw InvalidBracket("both bracket endpoints feasible; no constraint binds");
    if (!f_lo && !f_hi)
      throw InvalidBracket("both bracket endpoints infeasible");
    if (f_lo && !f_hi)
      throw InvalidBracket("feasibility is inverted on the bracket");
  }

  double t_star = bisect(trap, query.constraint, lo, hi, query.rel_tol, tol_box);

  // bracketing consistency at +-2 rel_tol; retry once on a halved bracket
  const double pad = 2.0 * query.rel_tol;
  if (!feasible(trap, t_star * (1.0 + pad), query.constraint, tol_box) ||
      feasible(trap, t_star * (1.0 - pad), query.constraint, tol_box)) {
    t_star = bisect(trap, query.constraint, lo, 0.5 * (lo + hi), query.rel_tol, tol_box);
    if (!feasible(trap, t_star * (1.0 + pad), query.constraint, tol_box) ||
        feasible(trap, t_star * (1.0 - pad), query.constraint, tol_box))
      throw NonMonotone("feasibility is not monotone around the bisection result");
  }
  return t_star;
}

SequentialTimes sequential_minimal_times(const TrapSpec& trap, double rel_tol) {
  TrapSpec expansion = trap;
  expansion.d = 0.0;
  expansion.v_f = 0.0;
  expansion.epsilon = 0.0;

  TrapSpec transport = trap;
  transport.gamma = 1.0;
  transport.epsilon = 0.0;
  if (trap.v_f != 0.0) {
    // launching cannot start in the weak trap at rest, so the expansion runs
    // first and the transport happens at the final frequency
    transport.omega0 = trap.omega0 / (trap.gamma * trap.gamma);
  }

  SequentialTimes out{};
  MinTimeQuery q;
  q.rel_tol = rel_tol;
  q.trap = expansion;
  q.constraint = Constraint::real_frequency;
  out.expansion = trap.gamma == 1.0 ? 0.0 : minimal_time(q);
  q.trap = transport;
  q.constraint = Constraint::box;
  out.transport = minimal_time(q);
  return out;
}

std::vector<double> default_sweep_grid(const TrapSpec& trap) {
  TrapSpec expansion = trap;
  expansion.d = 0.0;
  expansion.v_f = 0.0;
  expansion.epsilon = 0.0;
  MinTimeQuery q;
  q.trap = expansion;
  q.constraint = Constraint::real_frequency;
  q.rel_tol = 1e-6;
  const double t_min = minimal_time(q);
  std::vector<double> grid(30);
  const double lo = std::log(1.01), hi = std::log(5.0);
  for (int i = 0; i < 30; ++i)
    grid[i] = t_min * std::exp(lo + (hi - lo) * i / 29.0);
  return grid;
}

SweepResult sweep_exceeded_distance(const TrapSpec& trap, SweepMode mode,
                                    const std::vector<double>& t_f_values,
                                    int n_threads) {
  for (std::size_t i = 1; i < t_f_values.size(); ++i)
    if (!(t_f_values[i] > t_f_values[i - 1]))
      throw OutOfDomain("sweep t_f values must be strictly increasing");

  double t_exp = 0.0;
  TrapSpec stage = trap;
  if (mode == SweepMode::sequential) {
    TrapSpec expansion = trap;
    expansion.d = 0.0;
    expansion.v_f = 0.0;
    expansion.epsilon = 0.0;
    MinTimeQuery q;
    q.trap = expansion;
    q.constraint = Constraint::real_frequency;
    q.rel_tol = 1e-6;
    t_exp = minimal_time(q);
    // transport stage before the expansion, at the initial frequency; the
    // expansion stage holds the trap center fixed, so the concatenated
    // trajectory's extrema are those of the transport stage
    stage.gamma = 1.0;
    stage.epsilon = 0.0;
  }

  SweepResult out;
  out.metric = "xe_over_d";
  out.t_f = t_f_values;
  out.value.assign(t_f_values.size(), 0.0);

  auto eval_point = [&](std::size_t i) {
    const double t_f = t_f_values[i];
    double t_stage = t_f;
    if (mode == SweepMode::sequential) {
      t_stage = t_f - t_exp;
      if (t_stage <= 0.0)
        throw OutOfDomain("sweep t_f below the expansion-stage minimal time");
    }
    const ProtocolControls c = build_controls(stage, t_stage, 1001);
    const ConstraintReport r = check_constraints(c, default_box_tolerance(stage));
    // saturated trajectories produce rounding-level positives; report them as 0
    const double xe = r.exceeded_distance > default_box_tolerance(stage)
                          ? r.exceeded_distance
                          : 0.0;
    out.value[i] = xe / trap.d;
  };

  const int workers = std::max(1, std::min<int>(n_threads, static_cast<int>(t_f_values.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < t_f_values.size(); ++i) eval_point(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < t_f_values.size(); i += workers) eval_point(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace sta
