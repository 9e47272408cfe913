#pragma once

#include "gpb/kernels.hpp"

namespace gpb {

enum class GammaMethod { kExact, kGreedy };

struct GammaEstimate {
  double value;
  GammaMethod method;
  int t;
  double lambda;
};

// Largest information gain (1/2) log det(I + lambda^{-1} K_S) over all
// distinct t-point subsets S of the domain, by exhaustive enumeration.
// Guarded: requires |domain| <= 12 and t <= 8 (InstanceTooLarge beyond),
// and t <= |domain| (InvalidParameter).
[[nodiscard]] GammaEstimate gamma_exact(const KernelSpec& kernel, const ActionDomain& domain,
                                        int t, double lambda);

// Greedy lower estimate: t rounds of maximum-variance selection (ties to the
// lowest index), accumulating (1/2) sum of ln(1 + variance/lambda). By
// submodularity of the gain this is at least (1 - 1/e) of the exact maximum.
[[nodiscard]] GammaEstimate gamma_greedy(const KernelSpec& kernel, const ActionDomain& domain,
                                         int t, double lambda);

// Upper estimate obtained by dividing the greedy value by (1 - 1/e).
[[nodiscard]] double gamma_upper_estimate(const KernelSpec& kernel, const ActionDomain& domain,
                                          int t, double lambda);

}  // namespace gpb
