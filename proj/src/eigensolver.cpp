#include "sta/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "sta/constants.hpp"
#include "sta/errors.hpp"

namespace sta {

namespace {

// pencil A v = lambda B v with symmetric tridiagonal A, B
struct Pencil {
  std::vector<double> ad, ae;  // A diagonal, off-diagonal
  std::vector<double> bd, be;  // B diagonal, off-diagonal
  int n() const { return static_cast<int>(ad.size()); }
};

Pencil numerov_pencil(const std::vector<double>& v, double dx, double mass) {
  const int n = static_cast<int>(v.size());
  const double c = hbar * hbar / (2.0 * mass * dx * dx);
  Pencil p;
  p.ad.resize(n);
  p.bd.assign(n, 10.0 / 12.0);
  p.ae.resize(n - 1);
  p.be.assign(n - 1, 1.0 / 12.0);
  for (int i = 0; i < n; ++i) p.ad[i] = 2.0 * c + 10.0 * v[i] / 12.0;
  for (int i = 0; i + 1 < n; ++i) p.ae[i] = -c + (v[i] + v[i + 1]) / 24.0;
  return p;
}

// number of pencil eigenvalues below x (negative pivots of A - x B)
int sturm_count(const Pencil& p, double x) {
  const int n = p.n();
  int count = 0;
  double q = p.ad[0] - x * p.bd[0];
  if (q < 0.0) ++count;
  for (int i = 1; i < n; ++i) {
    const double e = p.ae[i - 1] - x * p.be[i - 1];
    double denom = q;
    if (denom == 0.0) denom = 1e-300;
    q = (p.ad[i] - x * p.bd[i]) - e * e / denom;
    if (q < 0.0) ++count;
  }
  return count;
}

double kth_eigenvalue(const Pencil& p, int k, double lo, double hi) {
  for (int iter = 0; iter < 140 && hi - lo > 1e-15 * (std::abs(lo) + std::abs(hi)) + 1e-300;
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(p, mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TridiagonalEigenResult numerov_lowest_eigenpairs(const std::vector<double>& potential,
                                                 double dx, double mass,
                                                 int n_states) {
  const Pencil p = numerov_pencil(potential, dx, mass);
  const int n = p.n();
  if (n < 8) throw StaError("grid too small for the eigensolver");
  if (n_states < 1 || n_states > n)
    throw StaError("n_states out of range");

  // pencil eigenvalue bounds: |lambda| <= ||A||_inf / lambda_min(B),
  // lambda_min(B) >= 10/12 - 2/12 = 2/3
  double a_norm = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = std::abs(p.ad[i]);
    if (i > 0) row += std::abs(p.ae[i - 1]);
    if (i + 1 < n) row += std::abs(p.ae[i]);
    a_norm = std::max(a_norm, row);
  }
  const double bound = 1.5 * a_norm + 1.0;

  TridiagonalEigenResult out;
  out.values.resize(n_states);
  for (int k = 0; k < n_states; ++k)
    out.values[k] = kth_eigenvalue(p, k, -bound, bound);

  // inverse iteration on (A - lambda B) x = B y
  out.vectors.assign(n_states, std::vector<double>(n));
  const double scale = a_norm;
  for (int k = 0; k < n_states; ++k) {
    const double shift = out.values[k] + 1e-12 * scale;
    std::vector<double> dl(n - 1), d(n), du(n - 1);
    for (int i = 0; i < n; ++i) d[i] = p.ad[i] - shift * p.bd[i];
    for (int i = 0; i + 1 < n; ++i) dl[i] = du[i] = p.ae[i] - shift * p.be[i];

    // LU with partial pivoting, dgttrf-style
    std::vector<double> du2(n, 0.0);
    std::vector<int> piv(n, 0);
    {
      for (int i = 0; i < n - 1; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
          if (d[i] == 0.0) d[i] = 1e-300;
          const double m = dl[i] / d[i];
          dl[i] = m;
          d[i + 1] -= m * du[i];
          if (i < n - 2) du2[i] = 0.0;
        } else {
          const double m = d[i] / dl[i];
          d[i] = dl[i];
          dl[i] = m;
          const double tmp = du[i];
          du[i] = d[i + 1];
          d[i + 1] = tmp - m * d[i + 1];
          if (i < n - 2) {
            du2[i] = du[i + 1];
            du[i + 1] = -m * du[i + 1];
          }
          piv[i] = 1;
        }
      }
    }
    auto solve = [&](std::vector<double>& x) {
      for (int i = 0; i < n - 1; ++i) {
        if (piv[i] == 0) {
          x[i + 1] -= dl[i] * x[i];
        } else {
          const double tmp = x[i];
          x[i] = x[i + 1];
          x[i + 1] = tmp - dl[i] * x[i];
        }
      }
      x[n - 1] /= d[n - 1];
      x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
      for (int i = n - 3; i >= 0; --i)
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    };

    // deterministic pseudo-random start
    std::vector<double>& v = out.vectors[k];
    std::uint64_t state = 0x9e3779b97f4a7c15ull + 0x1000u * static_cast<std::uint64_t>(k);
    for (int i = 0; i < n; ++i) {
      state = state * 6364136223846793005ull + 1442695040888963407ull;
      v[i] = static_cast<double>(static_cast<std::int64_t>(state >> 11)) / 9.2e18;
    }

    bool converged = false;
    for (int iter = 0; iter < 12 && !converged; ++iter) {
      // right-hand side B v
      std::vector<double> rhs(n);
      for (int i = 0; i < n; ++i) {
        rhs[i] = p.bd[i] * v[i];
        if (i > 0) rhs[i] += p.be[i - 1] * v[i - 1];
        if (i + 1 < n) rhs[i] += p.be[i] * v[i + 1];
      }
      solve(rhs);
      // B-orthogonalize against previously found vectors (degenerate clusters)
      for (int j = 0; j < k; ++j) {
        if (std::abs(out.values[j] - out.values[k]) > 1e-6 * scale) continue;
        const std::vector<double>& u = out.vectors[j];
        double dot = 0.0;
        for (int i = 0; i < n; ++i) {
          double bu = p.bd[i] * u[i];
          if (i > 0) bu += p.be[i - 1] * u[i - 1];
          if (i + 1 < n) bu += p.be[i] * u[i + 1];
          dot += rhs[i] * bu;
        }
        for (int i = 0; i < n; ++i) rhs[i] -= dot * u[i];
      }
      double norm = 0.0;
      for (double x : rhs) norm += x * x;
      norm = std::sqrt(norm);
      if (!(norm > 0.0)) throw NotConverged("inverse iteration collapsed to zero");
      for (int i = 0; i < n; ++i) v[i] = rhs[i] / norm;

      // residual ||A v - lambda B v||
      double res = 0.0, vnorm = 0.0;
      for (int i = 0; i < n; ++i) {
        double av = p.ad[i] * v[i];
        double bv = p.bd[i] * v[i];
        if (i > 0) {
          av += p.ae[i - 1] * v[i - 1];
          bv += p.be[i - 1] * v[i - 1];
        }
        if (i + 1 < n) {
          av += p.ae[i] * v[i + 1];
          bv += p.be[i] * v[i + 1];
        }
        const double r = av - out.values[k] * bv;
        res += r * r;
        vnorm += v[i] * v[i];
      }
      converged = std::sqrt(res) <= 1e-11 * scale * std::sqrt(vnorm);
    }
    if (!converged)
      throw NotConverged("inverse iteration residual did not converge for state " +
                         std::to_string(k));
  }

  // L2 normalization in x, deterministic sign at the leftmost antinode,
  // then L2 re-orthogonalization inside degenerate clusters
  for (int k = 0; k < n_states; ++k) {
    std::vector<double>& v = out.vectors[k];
    for (int j = 0; j < k; ++j) {
      if (std::abs(out.values[j] - out.values[k]) > 1e-6 * a_norm) continue;
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += v[i] * out.vectors[j][i];
      double jj = 0.0;
      for (int i = 0; i < n; ++i) jj += out.vectors[j][i] * out.vectors[j][i];
      for (int i = 0; i < n; ++i) v[i] -= dot / jj * out.vectors[j][i];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm * dx);
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::abs(x));
    int antinode = -1;
    for (int i = 1; i + 1 < n; ++i) {
      if (std::abs(v[i]) >= std::abs(v[i - 1]) && std::abs(v[i]) >= std::abs(v[i + 1]) &&
          std::abs(v[i]) > 0.05 * peak) {
        antinode = i;
        break;
      }
    }
    const double sign = (antinode >= 0 && v[antinode] < 0.0) ? -1.0 : 1.0;
    for (double& x : v) x *= sign / norm;
  }
  return out;
}

}  // namespace sta
