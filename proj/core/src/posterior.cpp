#include "gpb/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gpb {

GpPosterior::GpPosterior(const KernelSpec& kernel, double lambda)
    : kernel_(kernel), lambda_(lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidParameter("GpPosterior: lambda must be finite and positive");
  }
}

void GpPosterior::track(const ActionDomain& domain) {
  tracked_ = domain.points();
  tracked_gram_ = gram_matrix(kernel_, tracked_);
  tracked_prior_.resize(tracked_.size());
  for (std::size_t p = 0; p < tracked_.size(); ++p) tracked_prior_[p] = tracked_gram_(p, p);
  z_.assign(tracked_.size(), {});
  z_sq_.assign(tracked_.size(), 0.0);
  rebuild_caches();
}

std::vector<double> GpPosterior::cross_column(std::span<const double> x) const {
  std::vector<double> cross(queried_.size());
  for (std::size_t i = 0; i < queried_.size(); ++i) {
    cross[i] = kernel_eval(kernel_, queried_[i], x);
  }
  return cross;
}

void GpPosterior::extend_caches(std::span<const double> sub, double diag,
                                const std::vector<double>& x, int tracked_index) {
  const std::size_t t = sub.size();
  for (std::size_t p = 0; p < tracked_.size(); ++p) {
    const double cross = tracked_index >= 0 ? tracked_gram_(tracked_index, static_cast<int>(p))
                                            : kernel_eval(kernel_, x, tracked_[p]);
    const std::vector<double>& zp = z_[p];
    double acc = cross;
    for (std::size_t k = 0; k < t; ++k) acc -= sub[k] * zp[k];
    const double entry = acc / diag;
    z_[p].push_back(entry);
    z_sq_[p] += entry * entry;
  }
}

void GpPosterior::rebuild_caches() {
  for (std::size_t p = 0; p < tracked_.size(); ++p) {
    std::vector<double> cross(queried_.size());
    for (std::size_t i = 0; i < queried_.size(); ++i) {
      const int qi = queried_tracked_index_[i];
      cross[i] = qi >= 0 ? tracked_gram_(qi, static_cast<int>(p))
                         : kernel_eval(kernel_, queried_[i], tracked_[p]);
    }
    z_[p] = factor_.forward_solve(cross);
    double sq = 0.0;
    for (const double v : z_[p]) sq += v * v;
    z_sq_[p] = sq;
  }
  // Re-derive the solved observation prefix against the (possibly new) rows.
  const std::size_t m = y_.size();
  u_.assign(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    double acc = y_[k];
    for (std::size_t j = 0; j < k; ++j) {
      acc -= factor_.at(static_cast<int>(k), static_cast<int>(j)) * u_[j];
    }
    u_[k] = acc / factor_.at(static_cast<int>(k), static_cast<int>(k));
  }
  mean_weights_cache_.reset();
}

void GpPosterior::add_point_impl(const std::vector<double>& x, int tracked_index) {
  // Copy before any cache mutation: for a tracked point the solved
  // cross-column is its own cache entry.
  std::vector<double> sub =
      tracked_index >= 0 ? z_[tracked_index] : factor_.forward_solve(cross_column(x));
  const double corner = kernel_eval(kernel_, x, x) + lambda_;
  double pivot = corner;
  for (const double v : sub) pivot -= v * v;

  if (pivot > kPivotFloor) {
    const double diag = std::sqrt(pivot);
    factor_.append_row(sub, diag);
    queried_.push_back(x);
    queried_tracked_index_.push_back(tracked_index);
    extend_caches(sub, diag, x, tracked_index);
  } else {
    factor_ = extend_factor(factor_, cross_column(x), corner);
    queried_.push_back(x);
    queried_tracked_index_.push_back(tracked_index);
    rebuild_caches();
  }
  mean_weights_cache_.reset();
}

void GpPosterior::add_point(std::span<const double> x) {
  add_point_impl(std::vector<double>(x.begin(), x.end()), -1);
}

void GpPosterior::add_point(int tracked_index) {
  require_tracked(tracked_index);
  add_point_impl(tracked_[tracked_index], tracked_index);
}

void GpPosterior::set_observations(std::vector<double> ys) {
  if (static_cast<int>(ys.size()) != queried_count()) {
    throw DimensionMismatch("set_observations: got " + std::to_string(ys.size()) +
                            " values for " + std::to_string(queried_count()) +
                            " queried points");
  }
  std::size_t solved = y_.size();
  if (solved > ys.size() || !std::equal(y_.begin(), y_.end(), ys.begin())) {
    solved = 0;  // not an extension of the previous vector: solve from scratch
    u_.clear();
  }
  y_ = std::move(ys);
  u_.resize(y_.size());
  for (std::size_t k = solved; k < y_.size(); ++k) {
    double acc = y_[k];
    for (std::size_t j = 0; j < k; ++j) {
      acc -= factor_.at(static_cast<int>(k), static_cast<int>(j)) * u_[j];
    }
    u_[k] = acc / factor_.at(static_cast<int>(k), static_cast<int>(k));
  }
  mean_weights_cache_.reset();
}

void GpPosterior::append_observation(double y) {
  const std::size_t m = y_.size();
  if (static_cast<int>(m) >= queried_count()) {
    throw InvalidParameter("append_observation: every queried point already has an observation");
  }
  double acc = y;
  for (std::size_t j = 0; j < m; ++j) {
    acc -= factor_.at(static_cast<int>(m), static_cast<int>(j)) * u_[j];
  }
  u_.push_back(acc / factor_.at(static_cast<int>(m), static_cast<int>(m)));
  y_.push_back(y);
  mean_weights_cache_.reset();
}

double GpPosterior::checked_variance(double raw) const {
  if (raw < -1e-8) {
    throw NumericalBreakdown("posterior variance " + std::to_string(raw) +
                             " fell below the -1e-8 floor");
  }
  return std::max(0.0, raw);
}

void GpPosterior::require_tracked(int index) const {
  if (index < 0 || index >= tracked_count()) {
    throw InvalidParameter("GpPosterior: tracked index " + std::to_string(index) +
                           " out of range [0, " + std::to_string(tracked_count()) + ")");
  }
}

void GpPosterior::require_complete_observations() const {
  if (observation_count() != queried_count()) {
    throw ObservationsMissing("GpPosterior: " + std::to_string(queried_count()) +
                              " points queried but only " + std::to_string(observation_count()) +
                              " observed");
  }
}

const std::vector<double>& GpPosterior::mean_weights() const {
  if (!mean_weights_cache_) {
    mean_weights_cache_ = solve_spd(factor_, y_);
  }
  return *mean_weights_cache_;
}

double GpPosterior::mean(std::span<const double> x) const {
  require_complete_observations();
  if (queried_.empty()) return 0.0;
  const std::vector<double>& alpha = mean_weights();
  const std::vector<double> cross = cross_column(x);
  double acc = 0.0;
  for (std::size_t i = 0; i < cross.size(); ++i) acc += cross[i] * alpha[i];
  return acc;
}

double GpPosterior::variance(std::span<const double> x) const {
  const double prior = kernel_eval(kernel_, x, x);
  if (queried_.empty()) return checked_variance(prior);
  const std::vector<double> z = factor_.forward_solve(cross_column(x));
  double sq = 0.0;
  for (const double v : z) sq += v * v;
  return checked_variance(prior - sq);
}

double GpPosterior::mean_at(int tracked_index) const {
  require_tracked(tracked_index);
  require_complete_observations();
  const std::vector<double>& zp = z_[tracked_index];
  double acc = 0.0;
  for (std::size_t k = 0; k < zp.size(); ++k) acc += zp[k] * u_[k];
  return acc;
}

double GpPosterior::variance_at(int tracked_index) const {
  require_tracked(tracked_index);
  return checked_variance(tracked_prior_[tracked_index] - z_sq_[tracked_index]);
}

}  // namespace gpb
