#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gpb/confidence.hpp"
#include "gpb/kernels.hpp"
#include "gpb/posterior.hpp"

namespace gpb {

// Uniform per-round protocol: select an action from the offered index set,
// then report the chosen action's observed reward via update(). Contextual
// callers pass a strict subset of the domain; full-domain callers pass all
// indices.
class BanditAlgorithm {
 public:
  virtual ~BanditAlgorithm() = default;
  [[nodiscard]] virtual int select(std::span<const int> action_set) = 0;
  virtual void update(int action_index, double reward) = 0;
  [[nodiscard]] virtual std::string name() const = 0;
};

// ----- scoring helpers (shared by the algorithms, directly testable) -------

// Argmax of means[i] + radius * sigmas[i] over the candidate indices; ties
// resolve to the lowest action index.
[[nodiscard]] int select_ucb_argmax(std::span<const double> means, std::span<const double> sigmas,
                                    double radius, std::span<const int> candidates);

// Indices whose upper bound mean + radius*sigma reaches the largest lower
// bound max_j (mean_j - radius*sigma_j). The argmax of the lower bound always
// survives, so the result is never empty.
[[nodiscard]] std::vector<int> surviving_actions(std::span<const double> means,
                                                 std::span<const double> sigmas, double radius,
                                                 std::span<const int> active);

// ----- optimistic kernel bandits -------------------------------------------

// Common machinery: tracked posterior plus the running confidence radius.
class KernelUcbBase : public BanditAlgorithm {
 public:
  KernelUcbBase(const KernelSpec& kernel, const ActionDomain& domain,
                const ConfidenceParams& confidence);

  [[nodiscard]] int select(std::span<const int> action_set) override;
  void update(int action_index, double reward) override;

  [[nodiscard]] int rounds_played() const { return rounds_played_; }
  [[nodiscard]] const GpPosterior& posterior() const { return posterior_; }
  [[nodiscard]] const BetaAccumulator& beta_accumulator() const { return beta_acc_; }

  // Exploration radius for the upcoming round.
  [[nodiscard]] virtual double radius() const = 0;

 protected:
  GpPosterior posterior_;
  BetaAccumulator beta_acc_;
  int rounds_played_ = 0;
};

// Optimistic selection with the plain confidence radius; the benchmark
// length-scale of exploration under a well-specified model.
class GpUcb final : public KernelUcbBase {
 public:
  GpUcb(const KernelSpec& kernel, const ActionDomain& domain, const ConfidenceParams& confidence)
      : KernelUcbBase(kernel, domain, confidence) {}

  [[nodiscard]] double radius() const override { return beta_acc_.beta(); }
  [[nodiscard]] std::string name() const override { return "gp_ucb"; }
};

// Enlarged-confidence variant: adds eps * sqrt(t) / sqrt(lambda) to the
// radius to absorb misspecification of sup-norm size eps. With eps_input = 0
// the addition is exactly zero and the selection sequence matches GpUcb bit
// for bit.
class EcGpUcb final : public KernelUcbBase {
 public:
  EcGpUcb(const KernelSpec& kernel, const ActionDomain& domain,
          const ConfidenceParams& confidence, double eps_input);

  [[nodiscard]] double radius() const override {
    return beta_acc_.beta() +
           enlarged_bonus(eps_input_, rounds_played_ + 1, beta_acc_.params().lambda);
  }
  [[nodiscard]] double eps_input() const { return eps_input_; }
  [[nodiscard]] std::string name() const override { return "ec_gp_ucb"; }

 private:
  double eps_input_;
};

// ----- phased uncertainty sampling ------------------------------------------

struct EpisodeRecord {
  int episode;                 // 1-based
  int length;                  // queries in this episode
  double radius;               // confidence radius used for elimination
  int lcb_argmax;              // action attaining the largest lower bound
  std::vector<int> survivors;  // active set entering the next episode
};

// Episode-doubling pure exploration: within an episode, repeatedly query the
// highest-variance active action (observations are buffered, the in-episode
// posterior is variance-only); at the episode's end, fit the mean on the
// episode's own data and eliminate actions whose upper bound falls below the
// best lower bound. The posterior and radius restart every episode.
class PhasedUncertaintySampling final : public BanditAlgorithm {
 public:
  PhasedUncertaintySampling(const KernelSpec& kernel, const ActionDomain& domain,
                            const ConfidenceParams& confidence, int horizon,
                            bool split_delta_per_episode = true);

  // Offered sets are not supported here: the action_set must span the whole
  // domain, and selection happens within the surviving active set.
  [[nodiscard]] int select(std::span<const int> action_set) override;
  void update(int action_index, double reward) override;
  [[nodiscard]] std::string name() const override { return "phased_us"; }

  [[nodiscard]] const std::vector<int>& active_set() const { return active_; }
  [[nodiscard]] int episode() const { return episode_; }
  [[nodiscard]] int episode_length() const { return episode_length_; }
  [[nodiscard]] const std::vector<EpisodeRecord>& episode_log() const { return episode_log_; }
  [[nodiscard]] double episode_delta() const { return episode_delta_; }

 private:
  void end_episode();

  KernelSpec kernel_;
  ActionDomain domain_;
  ConfidenceParams confidence_;  // with the per-episode delta already applied
  double episode_delta_;
  GpPosterior posterior_;
  BetaAccumulator beta_acc_;
  std::vector<int> active_;
  std::vector<double> pending_;
  int episode_ = 1;
  int episode_length_ = 1;
  std::vector<EpisodeRecord> episode_log_;
};

// ----- regret-bound balancing master ----------------------------------------

// Anytime candidate regret bound of a base learner run with misspecification
// guess eps_hat: the theoretical curve
//   raw(n) = 2 beta_bar sqrt((2 lambda + 1) gamma n)
//          + 2 (eps_hat / sqrt(lambda)) sqrt((2 lambda + 1) gamma) n
// capped so the usable bound never exceeds n and never grows by more than 1
// per play: at(n) = min(raw(n), n, at(n-1) + 1), at(0) = 0.
class CandidateBound {
 public:
  CandidateBound(double beta_bar, double eps_hat, double gamma, double lambda);

  [[nodiscard]] double raw(int n) const;
  [[nodiscard]] double at(int n) const;
  [[nodiscard]] double eps_hat() const { return eps_hat_; }

 private:
  double beta_bar_;
  double eps_hat_;
  double gamma_;
  double lambda_;
};

struct MasterConfig {
  int num_bases;                 // M
  std::vector<double> eps_grid;  // eps_hat_i = 2^{1-i} / sqrt(gamma), i = 1..M
  double gamma_horizon;          // information-gain estimate at the horizon
  double beta_bar;               // pessimistic radius: log sum replaced by 2 gamma
  double consistency_c;          // scale of the elimination slack
  bool clamped;                  // true when the M formula fell below 1
};

// Base-count and guess grid for a horizon: M = ceil(1 + log2(horizon /
// gamma^2) / 2), clamped to at least 1 (clamped flag set when that fires).
[[nodiscard]] MasterConfig make_master_config(int horizon, double gamma_horizon,
                                              const ConfidenceParams& confidence,
                                              double consistency_c = 2.0);

// Elimination slack c * sqrt(n * ln(M * ln(max(n, 2)) / delta)) (floored at
// zero inside the root).
[[nodiscard]] double consistency_slack(double n, int num_bases, double delta, double c);

// Indices (positions in the active list) of bases failing the consistency
// test: J_i + bound_i + slack_i < max_j (J_j - slack_j).
[[nodiscard]] std::vector<int> inconsistent_bases(std::span<const double> rewards,
                                                  std::span<const double> plays,
                                                  std::span<const double> bounds,
                                                  double c, double delta, int num_bases);

// Runs one enlarged-confidence base per misspecification guess, always
// playing the base with the smallest current candidate bound, and eliminates
// bases whose cumulative reward is inconsistent with the others' lower
// confidence estimates.
class BalancingMaster final : public BanditAlgorithm {
 public:
  BalancingMaster(const KernelSpec& kernel, const ActionDomain& domain,
                  const ConfidenceParams& confidence, const MasterConfig& config);

  [[nodiscard]] std::pair<int, int> select_with_base(std::span<const int> action_set);
  void update_base(int base_index, int action_index, double reward);

  // BanditAlgorithm protocol: select stashes the chosen base for the
  // following update call.
  [[nodiscard]] int select(std::span<const int> action_set) override;
  void update(int action_index, double reward) override;
  [[nodiscard]] std::string name() const override { return "master"; }

  [[nodiscard]] int num_bases() const { return static_cast<int>(bases_.size()); }
  [[nodiscard]] bool is_active(int base_index) const { return active_[base_index]; }
  [[nodiscard]] std::vector<int> active_bases() const;
  [[nodiscard]] int plays(int base_index) const { return plays_[base_index]; }
  [[nodiscard]] double cumulative_reward(int base_index) const { return rewards_[base_index]; }
  [[nodiscard]] double bound_value(int base_index) const { return bound_values_[base_index]; }
  [[nodiscard]] const CandidateBound& bound(int base_index) const { return bounds_[base_index]; }
  [[nodiscard]] const EcGpUcb& base(int base_index) const { return *bases_[base_index]; }
  [[nodiscard]] const MasterConfig& config() const { return config_; }

 private:
  void eliminate_inconsistent();
  void check_balancing_invariant() const;

  MasterConfig config_;
  double delta_;
  std::vector<std::unique_ptr<EcGpUcb>> bases_;
  std::vector<CandidateBound> bounds_;
  std::vector<double> bound_values_;
  std::vector<int> plays_;
  std::vector<double> rewards_;
  std::vector<bool> active_;
  int pending_base_ = -1;
};

}  // namespace gpb
