#include "gpb/infogain.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "gpb/numerics.hpp"
#include "gpb/posterior.hpp"

namespace gpb {

namespace {

void check_common(const ActionDomain& domain, int t, double lambda) {
  if (t < 0) throw InvalidParameter("information gain: t must be >= 0");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidParameter("information gain: lambda must be finite and positive");
  }
  (void)domain;
}

// (1/2) log det(I + lambda^{-1} K) for the subset of domain points given by
// indices. The matrix has eigenvalues >= 1, so the plain factorization holds.
double half_log_det(const KernelSpec& kernel, const ActionDomain& domain,
                    const std::vector<int>& indices, double lambda) {
  const int n = static_cast<int>(indices.size());
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double k = kernel_eval(kernel, domain.point(indices[i]), domain.point(indices[j]));
      const double v = (i == j ? 1.0 : 0.0) + k / lambda;
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return 0.5 * cholesky_factor(m, 0.0).log_det();
}

}  // namespace

GammaEstimate gamma_exact(const KernelSpec& kernel, const ActionDomain& domain, int t,
                          double lambda) {
  check_common(domain, t, lambda);
  if (domain.size() > 12 || t > 8) {
    throw InstanceTooLarge("gamma_exact: guarded to |domain| <= 12 and t <= 8, got |domain| = " +
                           std::to_string(domain.size()) + ", t = " + std::to_string(t));
  }
  if (t > domain.size()) {
    throw InvalidParameter("gamma_exact: t = " + std::to_string(t) +
                           " exceeds the number of distinct domain points " +
                           std::to_string(domain.size()));
  }
  if (t == 0) return GammaEstimate{0.0, GammaMethod::kExact, 0, lambda};

  // Enumerate all t-element index combinations in lexicographic order.
  std::vector<int> indices(t);
  for (int i = 0; i < t; ++i) indices[i] = i;
  double best = -1.0;
  while (true) {
    best = std::max(best, half_log_det(kernel, domain, indices, lambda));
    int pos = t - 1;
    while (pos >= 0 && indices[pos] == domain.size() - t + pos) --pos;
    if (pos < 0) break;
    ++indices[pos];
    for (int i = pos + 1; i < t; ++i) indices[i] = indices[i - 1] + 1;
  }
  return GammaEstimate{best, GammaMethod::kExact, t, lambda};
}

GammaEstimate gamma_greedy(const KernelSpec& kernel, const ActionDomain& domain, int t,
                           double lambda) {
  check_common(domain, t, lambda);
  GpPosterior posterior(kernel, lambda);
  posterior.track(domain);
  double half_sum = 0.0;
  for (int round = 0; round < t; ++round) {
    int best = 0;
    double best_var = posterior.variance_at(0);
    for (int i = 1; i < domain.size(); ++i) {
      const double v = posterior.variance_at(i);
      if (v > best_var) {
        best = i;
        best_var = v;
      }
    }
    half_sum += 0.5 * std::log1p(best_var / lambda);
    posterior.add_point(best);
  }
  return GammaEstimate{half_sum, GammaMethod::kGreedy, t, lambda};
}

double gamma_upper_estimate(const KernelSpec& kernel, const ActionDomain& domain, int t,
                            double lambda) {
  const double greedy = gamma_greedy(kernel, domain, t, lambda).value;
  return greedy / (1.0 - std::exp(-1.0));
}

}  // namespace gpb
