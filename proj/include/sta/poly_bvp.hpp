#pragma once

#include <optional>
#include <vector>

#include "sta/polynomial.hpp"

namespace sta {

enum class TrajectoryKind { rho, alpha };

// Boundary data for one auxiliary function, with derivatives taken with
// respect to physical time. Third derivatives are present only for the
// eight-constraint (seventh-order) families.
struct BoundarySpec {
  double value0 = 0.0, valuef = 0.0;
  double deriv1_0 = 0.0, deriv1_f = 0.0;
  double deriv2_0 = 0.0, deriv2_f = 0.0;
  std::optional<double> deriv3_0, deriv3_f;

  int constraint_count() const {
    return 6 + (deriv3_0.has_value() ? 1 : 0) + (deriv3_f.has_value() ? 1 : 0);
  }
};

// Polynomial in scaled time s = t/t_f; coefficients are indexed by power of s.
struct PolynomialTrajectory {
  std::vector<double> coefficients;
  double t_f = 0.0;
  TrajectoryKind kind = TrajectoryKind::alpha;

  // deriv_order-th time derivative at t, exact Horner evaluation.
  double evaluate(double t, int deriv_order = 0) const;
};

// Solves the Hermite interpolation problem for the requested polynomial order
// (5 or 7). The linear system is assembled and solved in scaled variables.
PolynomialTrajectory solve_ansatz(const BoundarySpec& spec, int order,
                                  double t_f, TrajectoryKind kind);

// Positivity check over [0, t_f]: 2001 uniform samples plus the real roots of
// the derivative polynomial.
bool trajectory_positive(const PolynomialTrajectory& traj);

}  // namespace sta
