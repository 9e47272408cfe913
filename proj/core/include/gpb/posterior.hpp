#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gpb/kernels.hpp"
#include "gpb/numerics.hpp"

namespace gpb {

// Regularized kernel regression posterior over a growing set of queried
// points: with K_t the kernel matrix of the queries, Y the observations and
// lambda the regularizer,
//
//   mean(x)     = k_t(x)^T (K_t + lambda I)^{-1} Y
//   variance(x) = k(x, x) - k_t(x)^T (K_t + lambda I)^{-1} k_t(x)
//
// The factor of K_t + lambda I grows incrementally, one row per added point.
// Observations may lag behind queries (they arrive in batches for the phased
// algorithm); predictions of the mean require them to be complete.
//
// track() registers a finite action domain for which per-point prediction
// caches are maintained: after each added point, every tracked point's
// whitened cross-covariance (the forward-substitution prefix of its
// cross-column) gains one entry, making tracked variance O(1) and tracked
// mean O(t) per query — a round touching all of a domain of size D costs
// O(t * D) instead of O(t^2 * D).
class GpPosterior {
 public:
  GpPosterior(const KernelSpec& kernel, double lambda);

  // Registers domain points for cached predictions and index-based queries.
  // May be called at any time; caches for already-queried points are built
  // on the spot.
  void track(const ActionDomain& domain);

  // Adds a query point. The factor gains one row (forward solve + scalar
  // square root; a degenerate corner pivot triggers refactorization and a
  // cache rebuild).
  void add_point(std::span<const double> x);

  // Adds the tracked point with this index, reusing its cached whitened
  // cross-covariance — no triangular solve on the hot path.
  void add_point(int tracked_index);

  // Replaces the observation vector; length must equal the number of queried
  // points. Extending a previous vector reuses its solved prefix.
  void set_observations(std::vector<double> ys);

  // Appends one observation for the earliest still-unobserved query.
  void append_observation(double y);

  [[nodiscard]] double mean(std::span<const double> x) const;
  [[nodiscard]] double variance(std::span<const double> x) const;
  [[nodiscard]] double mean_at(int tracked_index) const;
  [[nodiscard]] double variance_at(int tracked_index) const;

  [[nodiscard]] int queried_count() const { return static_cast<int>(queried_.size()); }
  [[nodiscard]] int observation_count() const { return static_cast<int>(y_.size()); }
  [[nodiscard]] int tracked_count() const { return static_cast<int>(tracked_.size()); }
  [[nodiscard]] const std::vector<std::vector<double>>& queried_points() const { return queried_; }
  [[nodiscard]] const std::vector<double>& observations() const { return y_; }
  [[nodiscard]] const SpdFactor& factor() const { return factor_; }
  [[nodiscard]] double lambda() const { return lambda_; }
  [[nodiscard]] const KernelSpec& kernel() const { return kernel_; }

 private:
  void add_point_impl(const std::vector<double>& x, int tracked_index);
  void extend_caches(std::span<const double> sub, double diag, const std::vector<double>& x,
                     int tracked_index);
  void rebuild_caches();
  [[nodiscard]] std::vector<double> cross_column(std::span<const double> x) const;
  [[nodiscard]] double checked_variance(double raw) const;
  void require_tracked(int index) const;
  void require_complete_observations() const;
  const std::vector<double>& mean_weights() const;

  KernelSpec kernel_;
  double lambda_;
  std::vector<std::vector<double>> queried_;
  SpdFactor factor_;
  std::vector<double> y_;

  // u_ solves L u = Y for the leading observation_count() rows of the factor.
  std::vector<double> u_;

  // Tracked-domain caches: points, pairwise kernel values, prior variances,
  // per-point whitened cross-covariances z and their squared norms.
  std::vector<std::vector<double>> tracked_;
  Matrix tracked_gram_;
  std::vector<double> tracked_prior_;
  std::vector<std::vector<double>> z_;
  std::vector<double> z_sq_;

  // Which tracked index each queried point is (or -1): lets cache updates use
  // table lookups instead of kernel evaluations.
  std::vector<int> queried_tracked_index_;

  mutable std::optional<std::vector<double>> mean_weights_cache_;
};

}  // namespace gpb
