#include "sta/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace sta {

Polynomial::Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) {
  if (c_.empty()) c_.push_back(0.0);
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial({0.0});
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(std::move(d));
}

std::vector<double> Polynomial::real_roots(double lo, double hi) const {
  // trim negligible leading coefficients
  std::size_t n = c_.size();
  double scale = 0.0;
  for (double c : c_) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return {};
  while (n > 1 && std::abs(c_[n - 1]) < 1e-14 * scale) --n;
  if (n <= 1) return {};

  const std::size_t deg = n - 1;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  for (std::size_t i = 0; i + 1 < deg; ++i) companion(i + 1, i) = 1.0;
  for (std::size_t i = 0; i < deg; ++i) companion(i, deg - 1) = -c_[i] / c_[n - 1];

  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  std::vector<double> roots;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto z = es.eigenvalues()[i];
    if (std::abs(z.imag()) <= 1e-9 * (1.0 + std::abs(z.real())) &&
        z.real() >= lo && z.real() <= hi)
      roots.push_back(z.real());
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace sta
