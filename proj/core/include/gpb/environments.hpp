#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "gpb/kernels.hpp"
#include "gpb/rng.hpp"

namespace gpb {

// Finite kernel expansion f(x) = sum_i alpha_i k(z_i, x) with its kernel norm
// sqrt(alpha^T K alpha) cached at construction.
class RkhsFunction {
 public:
  RkhsFunction(const KernelSpec& kernel, std::vector<std::vector<double>> centers,
               std::vector<double> coefficients);

  [[nodiscard]] double value(std::span<const double> x) const;
  [[nodiscard]] double rkhs_norm() const { return norm_; }
  [[nodiscard]] const KernelSpec& kernel() const { return kernel_; }
  [[nodiscard]] const std::vector<std::vector<double>>& centers() const { return centers_; }
  [[nodiscard]] const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  KernelSpec kernel_;
  std::vector<std::vector<double>> centers_;
  std::vector<double> coeffs_;
  double norm_;
};

// Draws n_centers distinct domain points (seeded partial Fisher-Yates),
// gives them standard normal coefficients and rescales so the kernel norm
// equals target_norm exactly. Throws DegenerateGram when the centers' kernel
// matrix needs more than 1e-6 jitter to factorize.
[[nodiscard]] RkhsFunction synthesize_rkhs(const KernelSpec& kernel, const ActionDomain& domain,
                                           int n_centers, double target_norm, std::uint64_t seed);

// ----- misspecification descriptors -------------------------------------

struct MisspecNone {};

// m(x) = amplitude * sin(2 pi frequency . x): smooth, bounded by amplitude.
struct MisspecSinusoid {
  double amplitude;
  std::vector<double> frequency;
};

// m(p_i) = +/- amplitude with a seeded sign per domain point (sign is minus
// when the i-th output of SplitMix64(seed) is odd). Defined on grid points.
struct MisspecSignPattern {
  double amplitude;
  std::uint64_t seed;
};

// The true function is 0 everywhere except `height` at one point of the
// configured grid; that point is removed from the algorithm-visible domain.
// The benchmark is the kernel bump peaking at the hidden point with value
// height/2, which keeps the gap within height/2 everywhere.
struct MisspecSpike {
  double height;
  int location_index;  // into the grid the objective is built from
};

using MisspecKind = std::variant<MisspecNone, MisspecSinusoid, MisspecSignPattern, MisspecSpike>;

// Objective pair over a finite visible domain: benchmark f~ (an RKHS
// expansion plus an optional constant offset) and true function
// f* = f~ + m. The sup-norm bound eps on m is verified exhaustively over the
// domain at construction.
class MisspecifiedObjective {
 public:
  MisspecifiedObjective(RkhsFunction benchmark, double benchmark_offset, MisspecKind kind,
                        ActionDomain domain);

  // Spike construction: removes grid point `location_index` from the visible
  // domain, places the height spike there and uses the unit kernel bump
  // scaled to height/2 as the benchmark.
  [[nodiscard]] static MisspecifiedObjective make_spike(const KernelSpec& kernel,
                                                        const ActionDomain& grid, double height,
                                                        int location_index);

  [[nodiscard]] const ActionDomain& domain() const { return domain_; }
  [[nodiscard]] const RkhsFunction& benchmark() const { return benchmark_; }
  [[nodiscard]] double benchmark_offset() const { return benchmark_offset_; }
  [[nodiscard]] const MisspecKind& misspec() const { return kind_; }

  [[nodiscard]] double tilde_at(int index) const { return tilde_vals_[index]; }
  [[nodiscard]] double m_at(int index) const { return m_vals_[index]; }
  [[nodiscard]] double star_at(int index) const { return star_vals_[index]; }

  // Sup-norm bound on the gap |f* - f~| over the decision problem.
  [[nodiscard]] double eps_true() const { return eps_true_; }

  // Optima of the full decision problem. For the spike family these live at
  // the hidden point, not on the visible domain.
  [[nodiscard]] double star_optimum() const { return star_opt_; }
  [[nodiscard]] double tilde_optimum() const { return tilde_opt_; }

  // Argmax indices over the visible domain (ties to the lowest index).
  [[nodiscard]] int star_argmax() const { return star_argmax_; }
  [[nodiscard]] int tilde_argmax() const { return tilde_argmax_; }

 private:
  RkhsFunction benchmark_;
  double benchmark_offset_;
  MisspecKind kind_;
  ActionDomain domain_;
  std::vector<double> tilde_vals_;
  std::vector<double> m_vals_;
  std::vector<double> star_vals_;
  double eps_true_ = 0.0;
  double star_opt_ = 0.0;
  double tilde_opt_ = 0.0;
  int star_argmax_ = 0;
  int tilde_argmax_ = 0;
};

// Centered Gaussian observation noise (scale 0 means noiseless).
struct NoiseModel {
  double scale;

  explicit NoiseModel(double scale_);
  [[nodiscard]] double sample(SplitMix64& rng) const { return scale * rng.gaussian(); }
};

// Observation of the true function at a visible-domain point.
[[nodiscard]] double observe(const MisspecifiedObjective& objective, const NoiseModel& noise,
                             int index, SplitMix64& rng);

// Pair of observations sharing one noise draw: (true, benchmark). Lets tests
// compare the biased and unbiased estimators on identical noise.
[[nodiscard]] std::pair<double, double> observe_paired(const MisspecifiedObjective& objective,
                                                       const NoiseModel& noise, int index,
                                                       SplitMix64& rng);

// Weighted pool of action-index subsets presented to the learner each round.
class ContextDistribution {
 public:
  ContextDistribution(std::vector<std::vector<int>> pool, std::vector<double> weights,
                      int domain_size);

  // pool_size subsets of subset_size distinct indices each, drawn with a
  // seeded partial Fisher-Yates, uniform weights.
  [[nodiscard]] static ContextDistribution uniform_random_pool(int pool_size, int subset_size,
                                                               int domain_size,
                                                               std::uint64_t seed);

  [[nodiscard]] const std::vector<int>& sample(SplitMix64& rng) const;
  [[nodiscard]] const std::vector<std::vector<int>>& pool() const { return pool_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<std::vector<int>> pool_;
  std::vector<double> weights_;
};

// Compensated (Kahan) accumulator: the running sum differs from the exact
// sum of recorded terms by a few ulps, independent of length.
class KahanSum {
 public:
  void add(double v) {
    // Neumaier compensation: also sound when |v| exceeds |sum_|.
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct TraceRow {
  int round;  // 1-based
  int action_index;
  double reward;
  double inst_regret_star;
  double cum_regret_star;
  double cum_regret_tilde;
};

// Per-round regret bookkeeping against both the true function and the
// benchmark. When the offered action set spans the whole visible domain the
// round optima are the objective-level ones (which account for a hidden
// spike point); for a strict subset they are the subset maxima.
class RegretTrace {
 public:
  void record_round(const MisspecifiedObjective& objective, std::span<const int> action_set,
                    int chosen_index, double reward);

  [[nodiscard]] const std::vector<TraceRow>& rows() const { return rows_; }
  [[nodiscard]] double cum_regret_star() const { return star_sum_.value(); }
  [[nodiscard]] double cum_regret_tilde() const { return tilde_sum_.value(); }

  // Checks |R_T - R*_T| <= 2 eps T (plus fp slack); throws NumericalBreakdown.
  void validate_misspec_gap(double eps_true) const;

 private:
  std::vector<TraceRow> rows_;
  KahanSum star_sum_;
  KahanSum tilde_sum_;
};

}  // namespace gpb
