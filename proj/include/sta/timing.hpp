#pragma once

#include <string>
#include <vector>

#include "sta/protocol.hpp"

namespace sta {

enum class Constraint { real_frequency, box, both };

struct MinTimeQuery {
  TrapSpec trap;
  Constraint constraint = Constraint::both;
  double t_lo = 0.0, t_hi = 0.0;  // 0 -> use default bracket
  double rel_tol = 1e-4;
  double tol_box = -1.0;          // <0 -> default_box_tolerance(trap)
};

struct SweepResult {
  std::vector<double> t_f;     // seconds, strictly increasing
  std::vector<double> value;   // metric samples
  std::string metric;
};

enum class SweepMode { dual, sequential };

// Constraint-limited minimal protocol time by bisection on the feasibility
// indicator. Feasibility must hold at the upper bracket end and fail at the
// lower one.
double minimal_time(const MinTimeQuery& query);

// Protocol-independent lower bound sqrt(gamma^2 - 1)/omega0 for real-frequency
// expansions (0 when gamma <= 1).
double analytic_bound(const TrapSpec& trap);

// Stage times of the sequential protocol: expansion at its real-frequency
// minimum plus rigid transport at fixed frequency (omega0 when the end state
// is at rest, omega0/gamma^2 for launching, which must expand first).
struct SequentialTimes {
  double expansion;
  double transport;
  double total() const { return expansion + transport; }
};
SequentialTimes sequential_minimal_times(const TrapSpec& trap, double rel_tol = 1e-4);

// Exceeded-distance ratio x_e/d over a list of total process times.
// Sequential mode composes transport at omega0 (duration t_f minus the
// expansion stage minimum) followed by the expansion at its minimal time.
SweepResult sweep_exceeded_distance(const TrapSpec& trap, SweepMode mode,
                                    const std::vector<double>& t_f_values,
                                    int n_threads = 1);

// 30 log-spaced points from 1.01x to 5x the real-frequency minimal time.
std::vector<double> default_sweep_grid(const TrapSpec& trap);

}  // namespace sta
