#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "doctest.h"
#include "gpb/algorithms.hpp"
#include "gpb/environments.hpp"
#include "gpb/errors.hpp"
#include "gpb/kernels.hpp"
#include "gpb/rng.hpp"

using gpb::ActionDomain;
using gpb::BalancingMaster;
using gpb::CandidateBound;
using gpb::ConfidenceParams;
using gpb::consistency_slack;
using gpb::EcGpUcb;
using gpb::GpUcb;
using gpb::inconsistent_bases;
using gpb::KernelSpec;
using gpb::make_master_config;
using gpb::MasterConfig;
using gpb::MisspecifiedObjective;
using gpb::MisspecSinusoid;
using gpb::NoiseModel;
using gpb::PhasedUncertaintySampling;
using gpb::select_ucb_argmax;
using gpb::SplitMix64;
using gpb::surviving_actions;

namespace {

std::vector<int> all_indices(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

MisspecifiedObjective small_objective(const KernelSpec& k, const ActionDomain& d,
                                      std::uint64_t seed) {
  return {gpb::synthesize_rkhs(k, d, 4, 1.5, seed), 0.0, MisspecSinusoid{0.1, {3.0}}, d};
}

}  // namespace

TEST_CASE("ucb argmax picks the highest score and breaks ties low") {
  const std::vector<double> means{0.0, 1.0, 1.0};
  const std::vector<double> zeros{0.0, 0.0, 0.0};
  const std::vector<int> all{0, 1, 2};
  CHECK(select_ucb_argmax(means, zeros, 1.0, all) == 1);
  const std::vector<double> sigmas{2.0, 0.0, 0.0};
  CHECK(select_ucb_argmax(means, sigmas, 1.0, all) == 0);
  // Restriction by index set, not by position: ties still go to the lowest index.
  const std::vector<int> swapped{2, 1};
  CHECK(select_ucb_argmax(means, zeros, 1.0, swapped) == 1);

  CHECK_THROWS_AS((void)select_ucb_argmax(means, zeros, 1.0, std::vector<int>{}),
                  gpb::EmptyActionSet);
  CHECK_THROWS_AS((void)select_ucb_argmax(means, zeros, 1.0, std::vector<int>{3}),
                  gpb::InvalidParameter);
  const std::vector<double> short_sigmas{0.0};
  CHECK_THROWS_AS((void)select_ucb_argmax(means, short_sigmas, 1.0, all), gpb::DimensionMismatch);
}

TEST_CASE("survivors are the actions whose upper bound reaches the best lower bound") {
  const std::vector<double> means{1.0, 0.5, 0.0};
  const std::vector<double> sigmas{0.1, 0.1, 0.1};
  const std::vector<int> all{0, 1, 2};
  CHECK(surviving_actions(means, sigmas, 1.0, all) == std::vector<int>{0});
  // Wider radius: everything survives, including the boundary case ucb == lcb.
  CHECK(surviving_actions(means, sigmas, 5.0, all) == std::vector<int>{0, 1, 2});
  CHECK_THROWS_AS((void)surviving_actions(means, sigmas, 1.0, std::vector<int>{}),
                  gpb::EmptyActionSet);
}

TEST_CASE("optimistic base picks the lowest index on a flat prior") {
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain d = ActionDomain::grid(1, 8, 0.0, 1.0);
  GpUcb alg(k, d, ConfidenceParams(1.0, 1.0, 1.0, 0.1));
  const std::vector<int> all = all_indices(d.size());
  CHECK(alg.select(all) == 0);
  CHECK(alg.rounds_played() == 0);
  const double r0 = alg.radius();
  alg.update(0, 0.5);
  CHECK(alg.rounds_played() == 1);
  CHECK(alg.radius() > r0);
}

TEST_CASE("zero-guess enlarged confidence reproduces the plain algorithm bitwise") {
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain d = ActionDomain::grid(1, 16, 0.0, 1.0);
  const ConfidenceParams conf(1.5, 0.1, 1.0, 0.1);
  const MisspecifiedObjective obj = small_objective(k, d, 9);
  const NoiseModel noise(0.1);

  GpUcb plain(k, d, conf);
  EcGpUcb enlarged(k, d, conf, 0.0);
  SplitMix64 rng_a(33);
  SplitMix64 rng_b(33);
  const std::vector<int> all = all_indices(d.size());
  for (int t = 0; t < 40; ++t) {
    CHECK(plain.radius() == enlarged.radius());
    const int a = plain.select(all);
    const int b = enlarged.select(all);
    REQUIRE(a == b);
    const double ya = gpb::observe(obj, noise, a, rng_a);
    const double yb = gpb::observe(obj, noise, b, rng_b);
    CHECK(ya == yb);
    plain.update(a, ya);
    enlarged.update(b, yb);
  }
}

TEST_CASE("positive guess widens the radius by exactly the drift bonus") {
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain d = ActionDomain::grid(1, 8, 0.0, 1.0);
  const ConfidenceParams conf(1.0, 1.0, 2.0, 0.1);
  GpUcb plain(k, d, conf);
  EcGpUcb enlarged(k, d, conf, 0.3);
  CHECK(enlarged.eps_input() == 0.3);
  const std::vector<int> all = all_indices(d.size());
  SplitMix64 rng(4);
  for (int t = 0; t < 10; ++t) {
    // Upcoming round is t+1: bonus uses the round about to be played.
    const double expected = plain.radius() + 0.3 * std::sqrt(t + 1.0) / std::sqrt(2.0);
    CHECK(enlarged.radius() == doctest::Approx(expected).epsilon(1e-14));
    const int a = static_cast<int>(rng.below(8));
    const double y = rng.gaussian();
    plain.update(a, y);
    enlarged.update(a, y);
  }
  CHECK_THROWS_AS((void)EcGpUcb(k, d, conf, -0.1), gpb::InvalidParameter);
}

TEST_CASE("phased sampler doubles episodes and keeps survivor sets nested") {
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain d = ActionDomain::grid(1, 12, 0.0, 1.0);
  const ConfidenceParams conf(1.5, 0.1, 1.0, 0.1);
  const MisspecifiedObjective obj = small_objective(k, d, 21);
  const NoiseModel noise(0.1);
  PhasedUncertaintySampling alg(k, d, conf, 30);

  SplitMix64 rng(61);
  const std::vector<int> all = all_indices(d.size());
  for (int t = 0; t < 30; ++t) {
    const int a = alg.select(all);
    // Selection is always drawn from the surviving active set.
    const std::vector<int>& active = alg.active_set();
    CHECK(std::find(active.begin(), active.end(), a) != active.end());
    alg.update(a, gpb::observe(obj, noise, a, rng));
  }
  // 1 + 2 + 4 + 8 = 15 rounds close four episodes; round 30 sits mid-episode 5.
  const auto& log = alg.episode_log();
  REQUIRE(log.size() == 4);
  CHECK(alg.episode() == 5);
  CHECK(alg.episode_length() == 16);
  const std::vector<int>* prev = nullptr;
  for (std::size_t e = 0; e < log.size(); ++e) {
    CHECK(log[e].episode == static_cast<int>(e) + 1);
    CHECK(log[e].length == (1 << e));
    CHECK(log[e].radius > 0.0);
    CHECK(std::find(log[e].survivors.begin(), log[e].survivors.end(), log[e].lcb_argmax) !=
          log[e].survivors.end());
    if (prev != nullptr) {
      for (const int s : log[e].survivors) {
        CHECK(std::find(prev->begin(), prev->end(), s) != prev->end());
      }
    }
    prev = &log[e].survivors;
  }
}

TEST_CASE("phased sampler spreads its confidence budget over episode levels") {
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain d = ActionDomain::grid(1, 6, 0.0, 1.0);
  const ConfidenceParams conf(1.0, 1.0, 1.0, 0.09);
  // ceil(log2(200)) + 1 = 9 levels.
  PhasedUncertaintySampling split(k, d, conf, 200);
  CHECK(split.episode_delta() == doctest::Approx(0.01).epsilon(1e-14));
  PhasedUncertaintySampling whole(k, d, conf, 200, false);
  CHECK(whole.episode_delta() == 0.09);
  PhasedUncertaintySampling one(k, d, conf, 1);
  CHECK(one.episode_delta() == doctest::Approx(0.09).epsilon(1e-14));
  CHECK_THROWS_AS((void)PhasedUncertaintySampling(k, d, conf, 0), gpb::InvalidParameter);
}

TEST_CASE("phased sampler refuses restricted action sets") {
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain d = ActionDomain::grid(1, 6, 0.0, 1.0);
  PhasedUncertaintySampling alg(k, d, ConfidenceParams(1.0, 1.0, 1.0, 0.1), 10);
  const std::vector<int> subset{0, 1, 2};
  CHECK_THROWS_AS((void)alg.select(subset), gpb::InvalidParameter);
}

TEST_CASE("candidate bound follows its closed form and growth caps") {
  const CandidateBound b(2.0, 0.5, 4.0, 1.0);
  const double width = (2.0 * 1.0 + 1.0) * 4.0;
  CHECK(b.raw(3) ==
        doctest::Approx(4.0 * std::sqrt(width * 3.0) + std::sqrt(width) * 3.0).epsilon(1e-12));
  CHECK(b.raw(0) == 0.0);
  CHECK(b.at(0) == 0.0);
  // Early on the raw curve dominates n, so the usable bound tracks n itself.
  CHECK(b.at(1) == 1.0);
  CHECK(b.at(2) == 2.0);

  // A miniature curve comes in under all caps immediately.
  const CandidateBound tiny(0.1, 0.0, 0.04, 1.0);
  CHECK(tiny.at(1) == doctest::Approx(0.2 * std::sqrt(0.12)).epsilon(1e-12));

  double prev = 0.0;
  for (int n = 1; n <= 60; ++n) {
    const double cur = b.at(n);
    CHECK(cur <= n);
    CHECK(cur <= prev + 1.0 + 1e-12);
    CHECK(cur >= prev - 1e-12);
    CHECK(cur <= b.raw(n) + 1e-12);
    prev = cur;
  }
  CHECK_THROWS_AS((void)b.raw(-1), gpb::InvalidParameter);
  CHECK_THROWS_AS((void)CandidateBound(0.0, 0.1, 1.0, 1.0), gpb::InvalidParameter);
}

TEST_CASE("master configuration lays out a halving guess grid") {
  const ConfidenceParams conf(1.0, 1.0, 1.0, std::exp(-2.0));
  const MasterConfig cfg = make_master_config(1024, 4.0, conf, 2.0);
  CHECK(cfg.num_bases == 4);
  CHECK_FALSE(cfg.clamped);
  REQUIRE(cfg.eps_grid.size() == 4);
  CHECK(cfg.eps_grid[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cfg.eps_grid[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(cfg.eps_grid[2] == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(cfg.eps_grid[3] == doctest::Approx(0.0625).epsilon(1e-14));
  CHECK(cfg.beta_bar == doctest::Approx(std::sqrt(12.0) + 1.0).epsilon(1e-12));
  CHECK(cfg.consistency_c == 2.0);

  // Horizon far below gamma^2: the count formula dips under one and clamps.
  const MasterConfig clamped = make_master_config(2, 16.0, conf, 2.0);
  CHECK(clamped.num_bases == 1);
  CHECK(clamped.clamped);
  CHECK(clamped.eps_grid[0] == doctest::Approx(0.25).epsilon(1e-14));

  CHECK_THROWS_AS((void)make_master_config(0, 1.0, conf, 2.0), gpb::InvalidParameter);
  CHECK_THROWS_AS((void)make_master_config(10, 0.0, conf, 2.0), gpb::InvalidParameter);
  CHECK_THROWS_AS((void)make_master_config(10, 1.0, conf, 0.0), gpb::InvalidParameter);
}

TEST_CASE("consistency slack closed form and elimination outcome") {
  const double expected = 2.0 * std::sqrt(4.0 * std::log(3.0 * std::log(4.0) / 0.1));
  CHECK(consistency_slack(4.0, 3, 0.1, 2.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(consistency_slack(0.0, 3, 0.1, 2.0) == 0.0);
  // max(n, 2) keeps the inner logarithm positive at n = 1.
  CHECK(consistency_slack(1.0, 2, 0.1, 2.0) ==
        doctest::Approx(2.0 * std::sqrt(std::log(2.0 * std::log(2.0) / 0.1))).epsilon(1e-12));
  CHECK_THROWS_AS((void)consistency_slack(-1.0, 2, 0.1, 2.0), gpb::InvalidParameter);

  // Two bases, 100 plays each, slack 2 sqrt(100 ln(2 ln(100)/0.1)) = 42.54:
  // a base holding 80 reward with headroom 5 cannot reach 180 - slack.
  const std::vector<double> rewards{80.0, 180.0};
  const std::vector<double> plays{100.0, 100.0};
  const std::vector<double> bounds{5.0, 5.0};
  CHECK(inconsistent_bases(rewards, plays, bounds, 2.0, 0.1, 2) == std::vector<int>{0});
  // Larger headroom keeps the lagging base alive.
  const std::vector<double> loose{60.0, 5.0};
  CHECK(inconsistent_bases(rewards, plays, loose, 2.0, 0.1, 2).empty());
}

TEST_CASE("master eliminates a base whose reward cannot be explained") {
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain d = ActionDomain::grid(1, 6, 0.0, 1.0);
  const ConfidenceParams conf(1.0, 1.0, 1.0, 0.1);
  MasterConfig cfg;
  cfg.num_bases = 2;
  cfg.eps_grid = {0.0, 0.5};
  cfg.gamma_horizon = 1.0;
  cfg.beta_bar = 0.01;
  cfg.consistency_c = 0.1;
  cfg.clamped = false;
  BalancingMaster master(k, d, conf, cfg);

  // Round 1 goes to base 0 (bound tie, lowest index) and pays nothing.
  auto [base0, action0] = master.select_with_base(all_indices(6));
  CHECK(base0 == 0);
  master.update_base(base0, action0, 0.0);
  CHECK(master.is_active(0));

  // Round 2 goes to base 1 (its bound is still zero) and pays 1: the floor
  // 1 - slack(1) rises above base 0's ceiling bound + slack(1), so base 0
  // falls out.
  auto [base1, action1] = master.select_with_base(all_indices(6));
  CHECK(base1 == 1);
  master.update_base(base1, action1, 1.0);
  CHECK_FALSE(master.is_active(0));
  CHECK(master.active_bases() == std::vector<int>{1});

  CHECK_THROWS_AS(master.update_base(0, 0, 0.0), gpb::InactiveBase);
  CHECK_THROWS_AS(master.update_base(5, 0, 0.0), gpb::InvalidParameter);
}

TEST_CASE("master update without a pending selection is rejected") {
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain d = ActionDomain::grid(1, 4, 0.0, 1.0);
  const ConfidenceParams conf(1.0, 1.0, 1.0, 0.1);
  const MasterConfig cfg = make_master_config(64, 1.0, conf, 2.0);
  BalancingMaster master(k, d, conf, cfg);
  CHECK_THROWS_AS(master.update(0, 0.0), std::logic_error);

  MasterConfig broken = cfg;
  broken.eps_grid.pop_back();
  CHECK_THROWS_AS((void)BalancingMaster(k, d, conf, broken), gpb::InvalidParameter);
}

TEST_CASE("master keeps active candidate bounds within one unit of each other") {
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain d = ActionDomain::grid(1, 10, 0.0, 1.0);
  const ConfidenceParams conf(1.5, 0.1, 1.0, 0.1);
  const MisspecifiedObjective obj = small_objective(k, d, 13);
  const NoiseModel noise(0.1);
  const MasterConfig cfg = make_master_config(256, 1.0, conf, 2.0);
  BalancingMaster master(k, d, conf, cfg);
  CHECK(master.num_bases() == 5);

  SplitMix64 rng(92);
  const std::vector<int> all = all_indices(d.size());
  for (int t = 0; t < 80; ++t) {
    const int a = master.select(all);
    master.update(a, gpb::observe(obj, noise, a, rng));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const int i : master.active_bases()) {
      lo = std::min(lo, master.bound_value(i));
      hi = std::max(hi, master.bound_value(i));
    }
    CHECK(hi - lo <= 1.0 + 1e-9);
  }
  int total = 0;
  for (int i = 0; i < master.num_bases(); ++i) total += master.plays(i);
  CHECK(total == 80);
}
