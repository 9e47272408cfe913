#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "gpb/kernels.hpp"
#include "gpb/numerics.hpp"
#include "gpb/rng.hpp"

namespace gpb::testing {

// Random SPD matrix Q diag(d) Q^T with eigenvalues log-uniform in
// [eig_lo, eig_hi] and Q orthonormal via Gram-Schmidt on gaussian draws.
// Assembled from the lower triangle so the result is exactly symmetric.
inline Matrix random_spd(int n, SplitMix64& rng, double eig_lo = 1e-3, double eig_hi = 1e3) {
  std::vector<std::vector<double>> q;
  while (static_cast<int>(q.size()) < n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.gaussian();
    for (const auto& u : q) {
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += u[i] * v[i];
      for (int i = 0; i < n; ++i) v[i] -= dot * u[i];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-6) continue;
    for (double& x : v) x /= norm;
    q.push_back(std::move(v));
  }
  std::vector<double> d(n);
  const double llo = std::log(eig_lo);
  const double lhi = std::log(eig_hi);
  for (double& e : d) e = std::exp(llo + (lhi - llo) * rng.uniform());
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += d[k] * q[k][i] * q[k][j];
      a(i, j) = s;
      a(j, i) = s;
    }
  }
  return a;
}

// Dense rebuild of L L^T from a packed factor.
inline Matrix factor_product(const SpdFactor& f) {
  const int n = f.dim();
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      const int kmax = j < i ? j : i;
      for (int k = 0; k <= kmax; ++k) s += f.at(i, k) * f.at(j, k);
      m(i, j) = s;
      m(j, i) = s;
    }
  }
  return m;
}

// Random point set in [0,1]^d; distinct with overwhelming probability.
inline ActionDomain random_domain(int n, int d, SplitMix64& rng) {
  std::vector<std::vector<double>> pts(n, std::vector<double>(d));
  for (auto& p : pts) {
    for (double& x : p) x = rng.uniform();
  }
  return ActionDomain(d, std::move(pts));
}

}  // namespace gpb::testing
