#include "sta/poly_bvp.hpp"

#include <Eigen/Dense>

#include <cstdio>
#include <cmath>
#include <string>

#include "sta/errors.hpp"

namespace sta {

double PolynomialTrajectory::evaluate(double t, int deriv_order) const {
  if (deriv_order < 0 || deriv_order > 3)
    throw OutOfDomain("deriv_order must be in {0,1,2,3}, got " + std::to_string(deriv_order));
  const double slack = 1e-12 * t_f;
  if (t < -slack || t > t_f + slack)
    throw OutOfDomain("t = " + std::to_string(t) + " outside [0, " + std::to_string(t_f) + "]");
  const double s = std::min(std::max(t / t_f, 0.0), 1.0);

  std::vector<double> c = coefficients;
  for (int k = 0; k < deriv_order; ++k) {
    for (std::size_t i = 1; i < c.size(); ++i) c[i - 1] = static_cast<double>(i) * c[i];
    c.pop_back();
    if (c.empty()) return 0.0;
  }
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
  return acc / std::pow(t_f, deriv_order);
}

PolynomialTrajectory solve_ansatz(const BoundarySpec& spec, int order,
                                  double t_f, TrajectoryKind kind) {
  if (order != 5 && order != 7)
    throw OrderMismatch("ansatz order must be 5 or 7, got " + std::to_string(order));
  if (spec.constraint_count() != order + 1)
    throw OrderMismatch("constraint count " + std::to_string(spec.constraint_count()) +
                        " does not match order " + std::to_string(order));
  if (spec.deriv3_0.has_value() != spec.deriv3_f.has_value())
    throw OrderMismatch("third-derivative constraints must be given at both ends");
  if (!(t_f > 0.0)) throw OutOfDomain("t_f must be positive");

  const int n = order + 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b(n);

  // constraints in s-space: derivative values scale as t_f^k
  auto drow_at_1 = [&](int k, Eigen::Index row) {
    for (int j = k; j < n; ++j) {
      double f = 1.0;
      for (int q = 0; q < k; ++q) f *= static_cast<double>(j - q);
      A(row, j) = f;
    }
  };
  int r = 0;
  A(r, 0) = 1.0;                 b(r++) = spec.value0;
  drow_at_1(0, r);               b(r++) = spec.valuef;
  A(r, 1) = 1.0;                 b(r++) = spec.deriv1_0 * t_f;
  drow_at_1(1, r);               b(r++) = spec.deriv1_f * t_f;
  A(r, 2) = 2.0;                 b(r++) = spec.deriv2_0 * t_f * t_f;
  drow_at_1(2, r);               b(r++) = spec.deriv2_f * t_f * t_f;
  if (order == 7) {
    const double t3 = t_f * t_f * t_f;
    A(r, 3) = 6.0;               b(r++) = *spec.deriv3_0 * t3;
    drow_at_1(3, r);             b(r++) = *spec.deriv3_f * t3;
  }

  // scale the right-hand side so the solve is O(1) regardless of SI magnitudes
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(b(i)));
  if (scale == 0.0) scale = 1.0;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible())
    throw SingularSystem("boundary-constraint matrix is rank-deficient");
  const Eigen::VectorXd rhs = b / scale;
  Eigen::VectorXd c = lu.solve(rhs);
  c += lu.solve(rhs - A * c);  // one refinement pass

  // backward error of the scaled solve
  const double residual = (A * c - rhs).lpNorm<Eigen::Infinity>() /
                          (A.lpNorm<Eigen::Infinity>() * c.lpNorm<Eigen::Infinity>() +
                           rhs.lpNorm<Eigen::Infinity>());
  if (residual > 1e-12) {
    char msg[64];
    std::snprintf(msg, sizeof(msg), "boundary solve backward error %.3e", residual);
    throw SingularSystem(msg);
  }

  PolynomialTrajectory traj;
  traj.coefficients.assign(c.data(), c.data() + n);
  for (double& v : traj.coefficients) v *= scale;
  traj.t_f = t_f;
  traj.kind = kind;
  return traj;
}

bool trajectory_positive(const PolynomialTrajectory& traj) {
  const Polynomial p(traj.coefficients);
  for (int i = 0; i <= 2000; ++i) {
    if (p(static_cast<double>(i) / 2000.0) <= 0.0) return false;
  }
  for (double s : p.derivative().real_roots(0.0, 1.0)) {
    if (p(s) <= 0.0) return false;
  }
  return true;
}

}  // namespace sta
