#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sta/constants.hpp"
#include "sta/errors.hpp"
#include "sta/timing.hpp"

using namespace sta;

namespace {

const double w0 = 2.0 * std::acos(-1.0) * 2e6;

TrapSpec base_trap() {
  TrapSpec t;
  t.mass = mass_be9;
  t.omega0 = w0;
  t.gamma = std::sqrt(10.0);
  t.d = 370e-6;
  return t;
}

double min_time(const TrapSpec& trap, Constraint c, double rel_tol = 1e-5) {
  MinTimeQuery q;
  q.trap = trap;
  q.constraint = c;
  q.rel_tol = rel_tol;
  return minimal_time(q);
}

}  // namespace

TEST_CASE("expansion real-frequency minimal time") {
  TrapSpec t = base_trap();
  t.d = 0.0;
  const double ts = min_time(t, Constraint::real_frequency);
  CHECK(ts == doctest::Approx(0.442077e-6).epsilon(5e-4));  // quoted as 0.443 us
  CHECK(ts == doctest::Approx(0.443e-6).epsilon(1e-2));
}

TEST_CASE("rigid transport box minimal time") {
  TrapSpec t = base_trap();
  t.gamma = 1.0;
  const double ts = min_time(t, Constraint::box);
  CHECK(ts == doctest::Approx(0.199380e-6).epsilon(5e-4));  // quoted as 0.2 us
  CHECK(ts == doctest::Approx(0.2e-6).epsilon(1e-2));
}

TEST_CASE("dual transport box minimal time (independently computed)") {
  const double ts = min_time(base_trap(), Constraint::box);
  CHECK(ts == doctest::Approx(1.042411e-6).epsilon(5e-4));
  // both constraints together bind at the same point (freq threshold is lower)
  CHECK(min_time(base_trap(), Constraint::both) == doctest::Approx(ts).epsilon(1e-3));
}

TEST_CASE("launch transport at the final frequency") {
  TrapSpec t = base_trap();
  t.gamma = 1.0;
  t.v_f = 10.0;
  t.omega0 = w0 / 10.0;  // transport stage after the expansion
  const double ts = min_time(t, Constraint::box);
  CHECK(ts == doctest::Approx(2.291137e-6).epsilon(5e-4));  // quoted as 2.295 us
  CHECK(ts == doctest::Approx(2.295e-6).epsilon(1e-2));
}

TEST_CASE("dual launch minimal time (independently computed)") {
  TrapSpec t = base_trap();
  t.v_f = 10.0;
  const double ts = min_time(t, Constraint::both);
  CHECK(ts == doctest::Approx(1.340771e-6).epsilon(5e-4));
}

TEST_CASE("analytic bound values and ordering") {
  TrapSpec t = base_trap();
  t.gamma = 1.0;
  CHECK(analytic_bound(t) == 0.0);
  t.gamma = std::sqrt(10.0);
  CHECK(analytic_bound(t) == doctest::Approx(3.0 / w0).epsilon(1e-12));
  TrapSpec unit;
  unit.mass = 1.0;
  unit.omega0 = 1.0;
  unit.gamma = 2.0;
  CHECK(analytic_bound(unit) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));

  for (double g : {std::sqrt(3.0), 2.0, std::sqrt(10.0)}) {
    TrapSpec e = base_trap();
    e.gamma = g;
    e.d = 0.0;
    CHECK(analytic_bound(e) <= min_time(e, Constraint::real_frequency));
  }
}

TEST_CASE("bisection result is bracketing-consistent") {
  const TrapSpec trap = base_trap();
  MinTimeQuery q;
  q.trap = trap;
  q.constraint = Constraint::box;
  q.rel_tol = 1e-4;
  const double ts = minimal_time(q);
  const double pad = 2.0 * q.rel_tol;
  const auto feasible = [&](double tf) {
    const auto r = check_constraints(build_controls(trap, tf, 1001),
                                     default_box_tolerance(trap));
    return r.box_ok;
  };
  CHECK(feasible(ts * (1.0 + pad)));
  CHECK_FALSE(feasible(ts * (1.0 - pad)));
}

TEST_CASE("sequential stage sums") {
  const SequentialTimes transport = sequential_minimal_times(base_trap(), 1e-5);
  CHECK(transport.total() == doctest::Approx(0.641458e-6).epsilon(1e-3));
  CHECK(transport.total() == doctest::Approx(0.643e-6).epsilon(1e-2));

  TrapSpec launch = base_trap();
  launch.v_f = 10.0;
  const SequentialTimes seq = sequential_minimal_times(launch, 1e-5);
  CHECK(seq.expansion == doctest::Approx(0.442077e-6).epsilon(1e-3));
  CHECK(seq.transport == doctest::Approx(2.291137e-6).epsilon(1e-3));
  CHECK(seq.total() == doctest::Approx(2.734e-6).epsilon(1e-2));
}

TEST_CASE("exceeded-distance sweep") {
  const TrapSpec trap = base_trap();
  const auto grid = default_sweep_grid(trap);
  REQUIRE(grid.size() == 30);
  CHECK(grid.front() == doctest::Approx(1.01 * 0.442077e-6).epsilon(1e-3));
  CHECK(grid.back() == doctest::Approx(5.0 * 0.442077e-6).epsilon(1e-3));

  const auto dual = sweep_exceeded_distance(trap, SweepMode::dual, grid, 2);
  const auto seq = sweep_exceeded_distance(trap, SweepMode::sequential, grid, 2);
  REQUIRE(dual.value.size() == 30);
  REQUIRE(seq.value.size() == 30);

  // frozen regression values from an independent evaluation of the closed forms
  CHECK(dual.value[0] == doctest::Approx(36.083).epsilon(2e-3));
  CHECK(dual.value[6] == doctest::Approx(0.31937).epsilon(2e-3));
  CHECK(dual.value[14] == doctest::Approx(0.045790).epsilon(5e-3));
  CHECK(seq.value[0] == doctest::Approx(3739.7).epsilon(2e-3));
  CHECK(seq.value[4] == doctest::Approx(3.70548).epsilon(2e-3));
  CHECK(seq.value[6] == doctest::Approx(0.42229).epsilon(5e-3));

  // the dual ramp is inside the box well above its minimal time
  for (std::size_t i = 17; i < dual.value.size(); ++i) CHECK(dual.value[i] == 0.0);
  // where both protocols exceed the box, the sequential excess dominates
  for (std::size_t i = 0; i < 30; ++i) {
    if (seq.value[i] > 0.0 && dual.value[i] > 0.0) CHECK(seq.value[i] > dual.value[i]);
  }
  // near the threshold the sequential ratio grows dramatically
  CHECK(seq.value[0] > 100.0 * seq.value[6]);
}

TEST_CASE("invalid brackets are reported") {
  TrapSpec t = base_trap();
  t.gamma = 1.0;
  t.d = 0.0;  // nothing constrains a pure hold
  MinTimeQuery q;
  q.trap = t;
  q.constraint = Constraint::real_frequency;
  CHECK_THROWS_AS(minimal_time(q), InvalidBracket);

  q = MinTimeQuery{};
  q.trap = base_trap();
  q.constraint = Constraint::box;
  q.t_lo = 1e-9;
  q.t_hi = 2e-9;  // far below the threshold even after widening
  CHECK_THROWS_AS(minimal_time(q), InvalidBracket);
}
