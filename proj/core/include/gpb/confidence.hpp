#pragma once

#include <cmath>
#include <string>

#include "gpb/errors.hpp"

namespace gpb {

// Parameters of the confidence radius around the posterior mean.
struct ConfidenceParams {
  double norm_bound;   // bound B on the benchmark function's kernel norm
  double noise_scale;  // sub-Gaussian observation noise scale
  double lambda;       // posterior regularizer
  double delta;        // confidence failure probability

  ConfidenceParams(double norm_bound_, double noise_scale_, double lambda_, double delta_)
      : norm_bound(norm_bound_), noise_scale(noise_scale_), lambda(lambda_), delta(delta_) {
    if (!(norm_bound > 0.0) || !std::isfinite(norm_bound)) {
      throw InvalidParameter("ConfidenceParams: norm_bound must be finite and positive");
    }
    if (!(noise_scale > 0.0) || !std::isfinite(noise_scale)) {
      throw InvalidParameter("ConfidenceParams: noise_scale must be finite and positive");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw InvalidParameter("ConfidenceParams: lambda must be finite and positive");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
      throw InvalidParameter("ConfidenceParams: delta must lie in (0, 1)");
    }
  }
};

// Running confidence radius. After recording the predictive variances
// sigma^2_{t'-1}(x_t') of the first t-1 queries (each taken just before its
// query was added), beta() returns
//
//   beta_t = (noise_scale / sqrt(lambda)) *
//            sqrt(2 ln(1/delta) + sum ln(1 + variance/lambda)) + norm_bound.
//
// The log sum equals twice the information gain of the recorded sequence, so
// beta grows with the gain and never decreases round over round.
class BetaAccumulator {
 public:
  explicit BetaAccumulator(const ConfidenceParams& params) : params_(params) {}

  // Records one round's pre-query predictive variance (>= 0).
  void record_round(double predictive_variance) {
    if (predictive_variance < 0.0 || !std::isfinite(predictive_variance)) {
      throw InvalidParameter("BetaAccumulator: predictive variance must be finite and >= 0, got " +
                             std::to_string(predictive_variance));
    }
    log_sum_ += std::log1p(predictive_variance / params_.lambda);
    ++rounds_;
  }

  [[nodiscard]] double beta() const {
    return params_.noise_scale / std::sqrt(params_.lambda) *
               std::sqrt(2.0 * std::log(1.0 / params_.delta) + log_sum_) +
           params_.norm_bound;
  }

  // sum of ln(1 + variance/lambda) over recorded rounds.
  [[nodiscard]] double log_sum() const { return log_sum_; }
  [[nodiscard]] int rounds_recorded() const { return rounds_; }
  [[nodiscard]] const ConfidenceParams& params() const { return params_; }

 private:
  ConfidenceParams params_;
  double log_sum_ = 0.0;
  int rounds_ = 0;
};

// Additional exploration width eps * sqrt(t) / sqrt(lambda) that covers the
// worst-case drift of the mean when observations come from a function within
// sup-norm eps of the benchmark.
[[nodiscard]] inline double enlarged_bonus(double eps, int t, double lambda) {
  if (eps < 0.0 || !std::isfinite(eps)) {
    throw InvalidParameter("enlarged_bonus: eps must be finite and >= 0");
  }
  if (t < 0) throw InvalidParameter("enlarged_bonus: t must be >= 0");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidParameter("enlarged_bonus: lambda must be finite and positive");
  }
  return eps * std::sqrt(static_cast<double>(t)) / std::sqrt(lambda);
}

}  // namespace gpb
