#pragma once

#include <vector>

namespace sta {

// Dense polynomial with real coefficients indexed by power.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);

  double operator()(double x) const;  // Horner evaluation
  Polynomial derivative() const;
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coefficients() const { return c_; }

  // Real roots inside [lo, hi], via the companion-matrix eigenvalues of the
  // trailing-coefficient-trimmed polynomial.
  std::vector<double> real_roots(double lo, double hi) const;

 private:
  std::vector<double> c_;
};

}  // namespace sta
