#include "gpb/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gpb {

int select_ucb_argmax(std::span<const double> means, std::span<const double> sigmas, double radius,
                      std::span<const int> candidates) {
  if (means.size() != sigmas.size()) {
    throw DimensionMismatch("select_ucb_argmax: means and sigmas lengths differ");
  }
  if (candidates.empty()) {
    throw EmptyActionSet("select_ucb_argmax: no candidate actions");
  }
  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const int a : candidates) {
    if (a < 0 || a >= static_cast<int>(means.size())) {
      throw InvalidParameter("select_ucb_argmax: candidate " + std::to_string(a) +
                             " out of range");
    }
    const double score = means[a] + radius * sigmas[a];
    if (score > best_score || (score == best_score && a < best)) {
      best = a;
      best_score = score;
    }
  }
  return best;
}

std::vector<int> surviving_actions(std::span<const double> means, std::span<const double> sigmas,
                                   double radius, std::span<const int> active) {
  if (means.size() != sigmas.size()) {
    throw DimensionMismatch("surviving_actions: means and sigmas lengths differ");
  }
  if (active.empty()) {
    throw EmptyActionSet("surviving_actions: no active actions");
  }
  double max_lcb = -std::numeric_limits<double>::infinity();
  for (const int a : active) {
    if (a < 0 || a >= static_cast<int>(means.size())) {
      throw InvalidParameter("surviving_actions: action " + std::to_string(a) + " out of range");
    }
    max_lcb = std::max(max_lcb, means[a] - radius * sigmas[a]);
  }
  std::vector<int> survivors;
  for (const int a : active) {
    if (means[a] + radius * sigmas[a] >= max_lcb) survivors.push_back(a);
  }
  if (survivors.empty()) {
    // The lower-bound argmax always satisfies ucb >= lcb = max_lcb.
    throw std::logic_error("surviving_actions: empty survivor set");
  }
  return survivors;
}

// ----- optimistic kernel bandits -------------------------------------------

KernelUcbBase::KernelUcbBase(const KernelSpec& kernel, const ActionDomain& domain,
                             const ConfidenceParams& confidence)
    : posterior_(kernel, confidence.lambda), beta_acc_(confidence) {
  domain.validate_for(kernel);
  posterior_.track(domain);
}

int KernelUcbBase::select(std::span<const int> action_set) {
  if (action_set.empty()) {
    throw EmptyActionSet(name() + ": offered action set is empty");
  }
  const double rad = radius();
  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const int a : action_set) {
    const double score = posterior_.mean_at(a) + rad * std::sqrt(posterior_.variance_at(a));
    if (score > best_score || (score == best_score && a < best)) {
      best = a;
      best_score = score;
    }
  }
  return best;
}

void KernelUcbBase::update(int action_index, double reward) {
  beta_acc_.record_round(posterior_.variance_at(action_index));
  posterior_.add_point(action_index);
  posterior_.append_observation(reward);
  ++rounds_played_;
}

EcGpUcb::EcGpUcb(const KernelSpec& kernel, const ActionDomain& domain,
                 const ConfidenceParams& confidence, double eps_input)
    : KernelUcbBase(kernel, domain, confidence), eps_input_(eps_input) {
  if (eps_input < 0.0 || !std::isfinite(eps_input)) {
    throw InvalidParameter("EcGpUcb: eps_input must be finite and >= 0");
  }
}

// ----- phased uncertainty sampling ------------------------------------------

namespace {

double phased_delta(const ConfidenceParams& confidence, int horizon, bool split) {
  // horizon < 1 is rejected by the constructor body; keep the math safe here.
  if (!split || horizon < 1) return confidence.delta;
  const int levels = static_cast<int>(std::ceil(std::log2(static_cast<double>(horizon)))) + 1;
  return confidence.delta / static_cast<double>(std::max(levels, 1));
}

}  // namespace

PhasedUncertaintySampling::PhasedUncertaintySampling(const KernelSpec& kernel,
                                                     const ActionDomain& domain,
                                                     const ConfidenceParams& confidence,
                                                     int horizon, bool split_delta_per_episode)
    : kernel_(kernel),
      domain_(domain),
      confidence_(confidence.norm_bound, confidence.noise_scale, confidence.lambda,
                  phased_delta(confidence, horizon, split_delta_per_episode)),
      episode_delta_(confidence_.delta),
      posterior_(kernel, confidence.lambda),
      beta_acc_(confidence_) {
  if (horizon < 1) {
    throw InvalidParameter("PhasedUncertaintySampling: horizon must be >= 1");
  }
  domain_.validate_for(kernel_);
  posterior_.track(domain_);
  active_.resize(domain_.size());
  for (int i = 0; i < domain_.size(); ++i) active_[i] = i;
}

int PhasedUncertaintySampling::select(std::span<const int> action_set) {
  if (static_cast<int>(action_set.size()) != domain_.size()) {
    throw InvalidParameter(
        "phased_us: restricted action sets are not supported; offer the full domain");
  }
  int best = active_.front();
  double best_var = posterior_.variance_at(best);
  for (const int a : active_) {
    const double v = posterior_.variance_at(a);
    if (v > best_var) {
      best = a;
      best_var = v;
    }
  }
  return best;
}

void PhasedUncertaintySampling::update(int action_index, double reward) {
  beta_acc_.record_round(posterior_.variance_at(action_index));
  posterior_.add_point(action_index);
  pending_.push_back(reward);
  if (static_cast<int>(pending_.size()) == episode_length_) end_episode();
}

void PhasedUncertaintySampling::end_episode() {
  posterior_.set_observations(pending_);
  const double rad = beta_acc_.beta();

  std::vector<double> means(domain_.size());
  std::vector<double> sigmas(domain_.size());
  int lcb_argmax = active_.front();
  double max_lcb = -std::numeric_limits<double>::infinity();
  for (const int a : active_) {
    means[a] = posterior_.mean_at(a);
    sigmas[a] = std::sqrt(posterior_.variance_at(a));
    const double lcb = means[a] - rad * sigmas[a];
    if (lcb > max_lcb) {
      max_lcb = lcb;
      lcb_argmax = a;
    }
  }
  std::vector<int> survivors = surviving_actions(means, sigmas, rad, active_);
  if (std::find(survivors.begin(), survivors.end(), lcb_argmax) == survivors.end()) {
    throw std::logic_error("phased_us: lower-bound argmax missing from survivors");
  }

  episode_log_.push_back(
      EpisodeRecord{episode_, episode_length_, rad, lcb_argmax, survivors});
  active_ = std::move(survivors);

  ++episode_;
  episode_length_ *= 2;
  pending_.clear();
  posterior_ = GpPosterior(kernel_, confidence_.lambda);
  posterior_.track(domain_);
  beta_acc_ = BetaAccumulator(confidence_);
}

// ----- regret-bound balancing master ----------------------------------------

CandidateBound::CandidateBound(double beta_bar, double eps_hat, double gamma, double lambda)
    : beta_bar_(beta_bar), eps_hat_(eps_hat), gamma_(gamma), lambda_(lambda) {
  if (!(beta_bar > 0.0) || !(gamma > 0.0) || !(lambda > 0.0) || eps_hat < 0.0) {
    throw InvalidParameter("CandidateBound: requires beta_bar, gamma, lambda > 0 and eps_hat >= 0");
  }
}

double CandidateBound::raw(int n) const {
  if (n < 0) throw InvalidParameter("CandidateBound: n must be >= 0");
  const double width = (2.0 * lambda_ + 1.0) * gamma_;
  return 2.0 * beta_bar_ * std::sqrt(width * n) +
         2.0 * (eps_hat_ / std::sqrt(lambda_)) * std::sqrt(width) * n;
}

double CandidateBound::at(int n) const {
  if (n < 0) throw InvalidParameter("CandidateBound: n must be >= 0");
  double value = 0.0;
  for (int k = 1; k <= n; ++k) {
    value = std::min({raw(k), static_cast<double>(k), value + 1.0});
  }
  return value;
}

MasterConfig make_master_config(int horizon, double gamma_horizon,
                                const ConfidenceParams& confidence, double consistency_c) {
  if (horizon < 1) throw InvalidParameter("make_master_config: horizon must be >= 1");
  if (!(gamma_horizon > 0.0) || !std::isfinite(gamma_horizon)) {
    throw InvalidParameter("make_master_config: gamma_horizon must be finite and positive");
  }
  if (!(consistency_c > 0.0)) {
    throw InvalidParameter("make_master_config: consistency_c must be positive");
  }
  const double raw_m =
      1.0 + 0.5 * std::log2(static_cast<double>(horizon) / (gamma_horizon * gamma_horizon));
  int m = static_cast<int>(std::ceil(raw_m));
  bool clamped = false;
  if (m < 1) {
    m = 1;
    clamped = true;
  }
  MasterConfig config;
  config.num_bases = m;
  config.eps_grid.resize(m);
  for (int i = 1; i <= m; ++i) {
    config.eps_grid[i - 1] = std::pow(2.0, 1.0 - i) / std::sqrt(gamma_horizon);
  }
  config.gamma_horizon = gamma_horizon;
  config.beta_bar = confidence.noise_scale / std::sqrt(confidence.lambda) *
                        std::sqrt(2.0 * std::log(1.0 / confidence.delta) + 2.0 * gamma_horizon) +
                    confidence.norm_bound;
  config.consistency_c = consistency_c;
  config.clamped = clamped;
  return config;
}

double consistency_slack(double n, int num_bases, double delta, double c) {
  if (n < 0.0) throw InvalidParameter("consistency_slack: n must be >= 0");
  const double inner = static_cast<double>(num_bases) * std::log(std::max(n, 2.0)) / delta;
  const double arg = n * std::log(inner);
  return c * std::sqrt(std::max(arg, 0.0));
}

std::vector<int> inconsistent_bases(std::span<const double> rewards, std::span<const double> plays,
                                    std::span<const double> bounds, double c, double delta,
                                    int num_bases) {
  if (rewards.size() != plays.size() || rewards.size() != bounds.size()) {
    throw DimensionMismatch("inconsistent_bases: input lengths differ");
  }
  double best_floor = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < rewards.size(); ++j) {
    best_floor = std::max(best_floor,
                          rewards[j] - consistency_slack(plays[j], num_bases, delta, c));
  }
  std::vector<int> failing;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    const double ceiling =
        rewards[i] + bounds[i] + consistency_slack(plays[i], num_bases, delta, c);
    if (ceiling < best_floor) failing.push_back(static_cast<int>(i));
  }
  return failing;
}

BalancingMaster::BalancingMaster(const KernelSpec& kernel, const ActionDomain& domain,
                                 const ConfidenceParams& confidence, const MasterConfig& config)
    : config_(config), delta_(confidence.delta) {
  if (config.num_bases < 1 ||
      config.num_bases != static_cast<int>(config.eps_grid.size())) {
    throw InvalidParameter("BalancingMaster: config base count does not match eps grid");
  }
  for (int i = 0; i < config.num_bases; ++i) {
    bases_.push_back(std::make_unique<EcGpUcb>(kernel, domain, confidence, config.eps_grid[i]));
    bounds_.emplace_back(config.beta_bar, config.eps_grid[i], config.gamma_horizon,
                         confidence.lambda);
  }
  bound_values_.assign(config.num_bases, 0.0);
  plays_.assign(config.num_bases, 0);
  rewards_.assign(config.num_bases, 0.0);
  active_.assign(config.num_bases, true);
}

std::vector<int> BalancingMaster::active_bases() const {
  std::vector<int> out;
  for (int i = 0; i < num_bases(); ++i) {
    if (active_[i]) out.push_back(i);
  }
  return out;
}

std::pair<int, int> BalancingMaster::select_with_base(std::span<const int> action_set) {
  int chosen_base = -1;
  for (int i = 0; i < num_bases(); ++i) {
    if (!active_[i]) continue;
    if (chosen_base < 0 || bound_values_[i] < bound_values_[chosen_base]) chosen_base = i;
  }
  if (chosen_base < 0) {
    throw std::logic_error("BalancingMaster: no active base remains");
  }
  const int action = bases_[chosen_base]->select(action_set);
  pending_base_ = chosen_base;
  return {chosen_base, action};
}

int BalancingMaster::select(std::span<const int> action_set) {
  return select_with_base(action_set).second;
}

void BalancingMaster::update(int action_index, double reward) {
  if (pending_base_ < 0) {
    throw std::logic_error("BalancingMaster: update called before select");
  }
  const int base = pending_base_;
  pending_base_ = -1;
  update_base(base, action_index, reward);
}

void BalancingMaster::update_base(int base_index, int action_index, double reward) {
  if (base_index < 0 || base_index >= num_bases()) {
    throw InvalidParameter("BalancingMaster: base index " + std::to_string(base_index) +
                           " out of range");
  }
  if (!active_[base_index]) {
    throw InactiveBase("BalancingMaster: base " + std::to_string(base_index) +
                       " was eliminated");
  }
  bases_[base_index]->update(action_index, reward);
  plays_[base_index] += 1;
  rewards_[base_index] += reward;
  const int n = plays_[base_index];
  bound_values_[base_index] = std::min(
      {bounds_[base_index].raw(n), static_cast<double>(n), bound_values_[base_index] + 1.0});
  eliminate_inconsistent();
  check_balancing_invariant();
}

void BalancingMaster::eliminate_inconsistent() {
  std::vector<int> map;
  std::vector<double> rewards, plays, bounds;
  for (int i = 0; i < num_bases(); ++i) {
    if (!active_[i]) continue;
    map.push_back(i);
    rewards.push_back(rewards_[i]);
    plays.push_back(static_cast<double>(plays_[i]));
    bounds.push_back(bound_values_[i]);
  }
  const std::vector<int> failing =
      inconsistent_bases(rewards, plays, bounds, config_.consistency_c, delta_, num_bases());
  for (const int pos : failing) active_[map[pos]] = false;
  if (active_bases().empty()) {
    // The base attaining the floor always passes its own test.
    throw std::logic_error("BalancingMaster: consistency test eliminated every base");
  }
}

void BalancingMaster::check_balancing_invariant() const {
  double min_bound = std::numeric_limits<double>::infinity();
  double max_bound = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < num_bases(); ++i) {
    if (!active_[i]) continue;
    min_bound = std::min(min_bound, bound_values_[i]);
    max_bound = std::max(max_bound, bound_values_[i]);
  }
  if (max_bound > min_bound + 1.0 + 1e-9) {
    throw std::logic_error("BalancingMaster: balancing invariant violated: bounds span [" +
                           std::to_string(min_bound) + ", " + std::to_string(max_bound) + "]");
  }
}

}  // namespace gpb
