#include "gpb/environments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gpb/numerics.hpp"

namespace gpb {

RkhsFunction::RkhsFunction(const KernelSpec& kernel, std::vector<std::vector<double>> centers,
                           std::vector<double> coefficients)
    : kernel_(kernel), centers_(std::move(centers)), coeffs_(std::move(coefficients)) {
  if (centers_.empty()) {
    throw InvalidParameter("RkhsFunction: needs at least one center");
  }
  if (centers_.size() != coeffs_.size()) {
    throw DimensionMismatch("RkhsFunction: " + std::to_string(centers_.size()) + " centers vs " +
                            std::to_string(coeffs_.size()) + " coefficients");
  }
  const Matrix gram = gram_matrix(kernel_, centers_);
  try {
    const SpdFactor factor = cholesky_factor(gram);
    if (factor.jitter_applied() > 1e-6) {
      throw DegenerateGram("RkhsFunction: center kernel matrix required jitter " +
                           std::to_string(factor.jitter_applied()));
    }
  } catch (const NotFactorizable&) {
    throw DegenerateGram("RkhsFunction: center kernel matrix is numerically singular");
  }
  double quad = 0.0;
  const int n = static_cast<int>(centers_.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) quad += coeffs_[i] * gram(i, j) * coeffs_[j];
  }
  norm_ = std::sqrt(std::max(0.0, quad));
}

double RkhsFunction::value(std::span<const double> x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    acc += coeffs_[i] * kernel_eval(kernel_, centers_[i], x);
  }
  return acc;
}

RkhsFunction synthesize_rkhs(const KernelSpec& kernel, const ActionDomain& domain, int n_centers,
                             double target_norm, std::uint64_t seed) {
  if (n_centers < 1 || n_centers > domain.size()) {
    throw InvalidParameter("synthesize_rkhs: n_centers must lie in [1, |domain|]");
  }
  if (!(target_norm > 0.0) || !std::isfinite(target_norm)) {
    throw InvalidParameter("synthesize_rkhs: target_norm must be finite and positive");
  }
  SplitMix64 rng(seed);

  // Draw order: center indices (partial Fisher-Yates), then coefficients.
  std::vector<int> pool(domain.size());
  for (int i = 0; i < domain.size(); ++i) pool[i] = i;
  for (int i = 0; i < n_centers; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(pool.size() - i)));
    std::swap(pool[i], pool[j]);
  }
  std::vector<std::vector<double>> centers(n_centers);
  for (int i = 0; i < n_centers; ++i) centers[i] = domain.point(pool[i]);
  std::vector<double> coeffs(n_centers);
  for (int i = 0; i < n_centers; ++i) coeffs[i] = rng.gaussian();

  const RkhsFunction raw(kernel, centers, coeffs);
  if (!(raw.rkhs_norm() > 0.0)) {
    throw DegenerateGram("synthesize_rkhs: drawn coefficients have zero kernel norm");
  }
  const double scale = target_norm / raw.rkhs_norm();
  for (double& c : coeffs) c *= scale;
  return RkhsFunction(kernel, std::move(centers), std::move(coeffs));
}

// ----- misspecified objective --------------------------------------------

MisspecifiedObjective::MisspecifiedObjective(RkhsFunction benchmark, double benchmark_offset,
                                             MisspecKind kind, ActionDomain domain)
    : benchmark_(std::move(benchmark)),
      benchmark_offset_(benchmark_offset),
      kind_(std::move(kind)),
      domain_(std::move(domain)) {
  const int n = domain_.size();
  tilde_vals_.resize(n);
  for (int i = 0; i < n; ++i) {
    tilde_vals_[i] = benchmark_.value(domain_.point(i)) + benchmark_offset_;
  }

  m_vals_.assign(n, 0.0);
  bool spike = false;
  double spike_height = 0.0;
  if (std::holds_alternative<MisspecNone>(kind_)) {
    eps_true_ = 0.0;
  } else if (const auto* sin_kind = std::get_if<MisspecSinusoid>(&kind_)) {
    if (sin_kind->amplitude < 0.0 || !std::isfinite(sin_kind->amplitude)) {
      throw InvalidParameter("MisspecSinusoid: amplitude must be finite and >= 0");
    }
    if (static_cast<int>(sin_kind->frequency.size()) != domain_.dimension()) {
      throw DimensionMismatch("MisspecSinusoid: frequency dimension " +
                              std::to_string(sin_kind->frequency.size()) +
                              " does not match domain dimension " +
                              std::to_string(domain_.dimension()));
    }
    for (int i = 0; i < n; ++i) {
      double phase = 0.0;
      const std::vector<double>& p = domain_.point(i);
      for (int d = 0; d < domain_.dimension(); ++d) phase += sin_kind->frequency[d] * p[d];
      m_vals_[i] = sin_kind->amplitude * std::sin(2.0 * std::numbers::pi * phase);
    }
    eps_true_ = sin_kind->amplitude;
  } else if (const auto* sign_kind = std::get_if<MisspecSignPattern>(&kind_)) {
    if (sign_kind->amplitude < 0.0 || !std::isfinite(sign_kind->amplitude)) {
      throw InvalidParameter("MisspecSignPattern: amplitude must be finite and >= 0");
    }
    SplitMix64 rng(sign_kind->seed);
    for (int i = 0; i < n; ++i) {
      m_vals_[i] = (rng.next_u64() & 1u) ? -sign_kind->amplitude : sign_kind->amplitude;
    }
    eps_true_ = sign_kind->amplitude;
  } else {
    const auto& spike_kind = std::get<MisspecSpike>(kind_);
    // Only make_spike assembles a valid spike objective (single-center bump
    // benchmark, zero offset); reject hand-rolled combinations.
    if (benchmark_.centers().size() != 1 || benchmark_offset_ != 0.0 ||
        std::fabs(benchmark_.coefficients()[0] - spike_kind.height / 2.0) > 1e-12) {
      throw InvalidParameter(
          "MisspecSpike: use MisspecifiedObjective::make_spike to build spike objectives");
    }
    spike = true;
    spike_height = spike_kind.height;
    for (int i = 0; i < n; ++i) m_vals_[i] = -tilde_vals_[i];  // true function is 0 off-spike
    // Gap at the hidden point: height - height/2; on the visible domain the
    // gap equals the bump value, which the unit-scale kernel keeps below
    // height/2. Either way the sup is height/2.
    eps_true_ = spike_height / 2.0;
  }

  star_vals_.resize(n);
  for (int i = 0; i < n; ++i) star_vals_[i] = tilde_vals_[i] + m_vals_[i];

  // The sup-norm promise on the gap is part of the type's contract: verify it
  // exhaustively rather than trusting the construction above.
  for (int i = 0; i < n; ++i) {
    if (std::fabs(m_vals_[i]) > eps_true_ + 1e-12) {
      throw InvalidParameter("MisspecifiedObjective: |m| = " + std::to_string(std::fabs(m_vals_[i])) +
                             " at index " + std::to_string(i) + " exceeds eps = " +
                             std::to_string(eps_true_));
    }
  }

  star_argmax_ = 0;
  tilde_argmax_ = 0;
  for (int i = 1; i < n; ++i) {
    if (star_vals_[i] > star_vals_[star_argmax_]) star_argmax_ = i;
    if (tilde_vals_[i] > tilde_vals_[tilde_argmax_]) tilde_argmax_ = i;
  }
  if (spike) {
    // Optima sit at the hidden grid point: f* = height, f~ = height / 2.
    star_opt_ = spike_height;
    tilde_opt_ = spike_height / 2.0;
  } else {
    star_opt_ = star_vals_[star_argmax_];
    tilde_opt_ = tilde_vals_[tilde_argmax_];
  }
}

MisspecifiedObjective MisspecifiedObjective::make_spike(const KernelSpec& kernel,
                                                        const ActionDomain& grid, double height,
                                                        int location_index) {
  if (!(height > 0.0) || !std::isfinite(height)) {
    throw InvalidParameter("make_spike: height must be finite and positive");
  }
  if (location_index < 0 || location_index >= grid.size()) {
    throw InvalidParameter("make_spike: location_index " + std::to_string(location_index) +
                           " out of range [0, " + std::to_string(grid.size()) + ")");
  }
  if (grid.size() < 2) {
    throw EmptyActionSet("make_spike: removing the spike point would empty the domain");
  }
  if (kernel.family() == KernelFamily::kLinear) {
    throw InvalidParameter("make_spike: requires a kernel with k(x, x) = 1 (not linear)");
  }
  const std::vector<double> hidden = grid.point(location_index);
  std::vector<std::vector<double>> visible;
  visible.reserve(grid.size() - 1);
  for (int i = 0; i < grid.size(); ++i) {
    if (i != location_index) visible.push_back(grid.point(i));
  }
  RkhsFunction bump(kernel, {hidden}, {height / 2.0});
  return MisspecifiedObjective(std::move(bump), 0.0, MisspecSpike{height, location_index},
                               ActionDomain(grid.dimension(), std::move(visible)));
}

NoiseModel::NoiseModel(double scale_) : scale(scale_) {
  if (scale < 0.0 || !std::isfinite(scale)) {
    throw InvalidParameter("NoiseModel: scale must be finite and >= 0");
  }
}

double observe(const MisspecifiedObjective& objective, const NoiseModel& noise, int index,
               SplitMix64& rng) {
  if (index < 0 || index >= objective.domain().size()) {
    throw InvalidParameter("observe: action index " + std::to_string(index) + " out of range");
  }
  return objective.star_at(index) + noise.sample(rng);
}

std::pair<double, double> observe_paired(const MisspecifiedObjective& objective,
                                         const NoiseModel& noise, int index, SplitMix64& rng) {
  if (index < 0 || index >= objective.domain().size()) {
    throw InvalidParameter("observe_paired: action index " + std::to_string(index) +
                           " out of range");
  }
  const double eta = noise.sample(rng);
  return {objective.star_at(index) + eta, objective.tilde_at(index) + eta};
}

// ----- contexts -----------------------------------------------------------

ContextDistribution::ContextDistribution(std::vector<std::vector<int>> pool,
                                         std::vector<double> weights, int domain_size)
    : pool_(std::move(pool)), weights_(std::move(weights)) {
  if (pool_.empty()) {
    throw InvalidParameter("ContextDistribution: pool is empty");
  }
  if (weights_.size() != pool_.size()) {
    throw DimensionMismatch("ContextDistribution: " + std::to_string(pool_.size()) +
                            " subsets vs " + std::to_string(weights_.size()) + " weights");
  }
  double total = 0.0;
  for (const double w : weights_) {
    if (w < 0.0 || !std::isfinite(w)) {
      throw InvalidParameter("ContextDistribution: weights must be finite and >= 0");
    }
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    throw InvalidParameter("ContextDistribution: weights sum to " + std::to_string(total) +
                           ", expected 1");
  }
  for (std::size_t s = 0; s < pool_.size(); ++s) {
    if (pool_[s].empty()) {
      throw EmptyActionSet("ContextDistribution: subset " + std::to_string(s) + " is empty");
    }
    std::vector<int> sorted = pool_[s];
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i] < 0 || sorted[i] >= domain_size) {
        throw InvalidParameter("ContextDistribution: subset " + std::to_string(s) +
                               " references action " + std::to_string(sorted[i]) +
                               " outside the domain");
      }
      if (i > 0 && sorted[i] == sorted[i - 1]) {
        throw InvalidParameter("ContextDistribution: subset " + std::to_string(s) +
                               " repeats action " + std::to_string(sorted[i]));
      }
    }
  }
}

ContextDistribution ContextDistribution::uniform_random_pool(int pool_size, int subset_size,
                                                             int domain_size, std::uint64_t seed) {
  if (pool_size < 1) throw InvalidParameter("uniform_random_pool: pool_size must be >= 1");
  if (subset_size < 1 || subset_size > domain_size) {
    throw InvalidParameter("uniform_random_pool: subset_size must lie in [1, domain_size]");
  }
  SplitMix64 rng(seed);
  std::vector<std::vector<int>> pool(pool_size);
  std::vector<int> indices(domain_size);
  for (std::vector<int>& subset : pool) {
    for (int i = 0; i < domain_size; ++i) indices[i] = i;
    for (int i = 0; i < subset_size; ++i) {
      const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(domain_size - i)));
      std::swap(indices[i], indices[j]);
    }
    subset.assign(indices.begin(), indices.begin() + subset_size);
    std::sort(subset.begin(), subset.end());
  }
  return ContextDistribution(std::move(pool),
                             std::vector<double>(pool_size, 1.0 / pool_size), domain_size);
}

const std::vector<int>& ContextDistribution::sample(SplitMix64& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < pool_.size(); ++i) {
    acc += weights_[i];
    if (u < acc) return pool_[i];
  }
  return pool_.back();
}

// ----- regret trace --------------------------------------------------------

void RegretTrace::record_round(const MisspecifiedObjective& objective,
                               std::span<const int> action_set, int chosen_index, double reward) {
  if (action_set.empty()) {
    throw EmptyActionSet("record_round: offered action set is empty");
  }
  bool chosen_present = false;
  double star_best = -std::numeric_limits<double>::infinity();
  double tilde_best = star_best;
  for (const int a : action_set) {
    if (a < 0 || a >= objective.domain().size()) {
      throw InvalidParameter("record_round: action " + std::to_string(a) + " outside the domain");
    }
    star_best = std::max(star_best, objective.star_at(a));
    tilde_best = std::max(tilde_best, objective.tilde_at(a));
    chosen_present = chosen_present || a == chosen_index;
  }
  if (!chosen_present) {
    throw ActionNotInSet("record_round: chosen action " + std::to_string(chosen_index) +
                         " is not in the offered set");
  }
  // A set that spans the whole visible domain competes against the full
  // decision problem, including a spike point hidden from the learner.
  if (static_cast<int>(action_set.size()) == objective.domain().size()) {
    star_best = objective.star_optimum();
    tilde_best = objective.tilde_optimum();
  }
  const double inst_star = star_best - objective.star_at(chosen_index);
  const double inst_tilde = tilde_best - objective.tilde_at(chosen_index);
  star_sum_.add(inst_star);
  tilde_sum_.add(inst_tilde);
  rows_.push_back(TraceRow{static_cast<int>(rows_.size()) + 1, chosen_index, reward, inst_star,
                           star_sum_.value(), tilde_sum_.value()});
}

void RegretTrace::validate_misspec_gap(double eps_true) const {
  const double gap = std::fabs(cum_regret_star() - cum_regret_tilde());
  const double bound = 2.0 * eps_true * static_cast<double>(rows_.size());
  if (gap > bound + 1e-9 * (1.0 + static_cast<double>(rows_.size()))) {
    throw NumericalBreakdown("RegretTrace: |R - R*| = " + std::to_string(gap) +
                             " exceeds 2 eps T = " + std::to_string(bound));
  }
}

}  // namespace gpb
