#pragma once

#include <vector>

namespace sta {

// Lowest eigenpairs of  -(hbar^2/2m) phi'' + V(x) phi = lambda phi  on a
// uniform grid with Dirichlet ends, discretized with the Numerov-corrected
// three-point stencil (fourth-order accurate eigenvalues). Eigenvalues are
// found by Sturm bisection on the matrix pencil, eigenvectors by inverse
// iteration. Vectors are normalized to sum(phi^2) dx = 1 with the sign fixed
// so the leftmost antinode is positive.
struct TridiagonalEigenResult {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
};

TridiagonalEigenResult numerov_lowest_eigenpairs(const std::vector<double>& potential,
                                                 double dx, double mass,
                                                 int n_states);

}  // namespace sta
