#include <cmath>
#include <utility>
#include <vector>

#include "doctest.h"
#include "gpb/environments.hpp"
#include "gpb/errors.hpp"
#include "gpb/kernels.hpp"
#include "gpb/numerics.hpp"
#include "gpb/rng.hpp"
#include "helpers.hpp"

using gpb::ActionDomain;
using gpb::KernelSpec;
using gpb::MisspecifiedObjective;
using gpb::MisspecSignPattern;
using gpb::MisspecSinusoid;
using gpb::NoiseModel;
using gpb::RkhsFunction;
using gpb::SplitMix64;
using gpb::synthesize_rkhs;

TEST_CASE("kernel norm of an explicit expansion matches the quadratic form") {
  const KernelSpec k = KernelSpec::squared_exponential(0.3);
  const std::vector<std::vector<double>> centers{{0.1}, {0.6}, {0.9}};
  const std::vector<double> alpha{1.0, -2.0, 0.5};
  const RkhsFunction f(k, centers, alpha);
  double quad = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = 0; j < centers.size(); ++j) {
      quad += alpha[i] * alpha[j] * gpb::kernel_eval(k, centers[i], centers[j]);
    }
  }
  CHECK(f.rkhs_norm() == doctest::Approx(std::sqrt(quad)).epsilon(1e-12));
  const std::vector<double> x{0.4};
  double val = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    val += alpha[i] * gpb::kernel_eval(k, centers[i], x);
  }
  CHECK(f.value(x) == doctest::Approx(val).epsilon(1e-12));
}

TEST_CASE("synthesized functions hit the target norm exactly and deterministically") {
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain d = ActionDomain::grid(1, 40, 0.0, 1.0);
  const RkhsFunction f = synthesize_rkhs(k, d, 8, 2.5, 42);
  CHECK(f.rkhs_norm() == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(f.centers().size() == 8);
  const RkhsFunction g = synthesize_rkhs(k, d, 8, 2.5, 42);
  CHECK(f.value(d.point(3)) == g.value(d.point(3)));
  const RkhsFunction h = synthesize_rkhs(k, d, 8, 2.5, 43);
  CHECK(f.value(d.point(3)) != h.value(d.point(3)));
}

TEST_CASE("sinusoidal gap is the advertised trigonometric surface") {
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain d = ActionDomain::grid(1, 32, 0.0, 1.0);
  const RkhsFunction f = synthesize_rkhs(k, d, 5, 1.0, 7);
  const double amp = 0.3;
  const std::vector<double> freq{7.0};
  const MisspecifiedObjective obj(f, 0.25, MisspecSinusoid{amp, freq}, d);
  CHECK(obj.eps_true() <= amp + 1e-12);
  for (int i = 0; i < d.size(); ++i) {
    const double x = d.point(i)[0];
    const double expected = amp * std::sin(2.0 * M_PI * freq[0] * x);
    CHECK(obj.m_at(i) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(obj.tilde_at(i) == doctest::Approx(f.value(d.point(i)) + 0.25).epsilon(1e-12));
    CHECK(obj.star_at(i) == doctest::Approx(obj.tilde_at(i) + obj.m_at(i)).epsilon(1e-12));
  }
  CHECK(obj.star_optimum() == doctest::Approx(obj.star_at(obj.star_argmax())));
  CHECK(obj.tilde_optimum() == doctest::Approx(obj.tilde_at(obj.tilde_argmax())));
}

TEST_CASE("sign-pattern gap is reproducible and saturates its amplitude") {
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain d = ActionDomain::grid(1, 16, 0.0, 1.0);
  const RkhsFunction f = synthesize_rkhs(k, d, 4, 1.0, 3);
  const MisspecifiedObjective a(f, 0.0, MisspecSignPattern{0.2, 99}, d);
  const MisspecifiedObjective b(f, 0.0, MisspecSignPattern{0.2, 99}, d);
  bool saw_plus = false;
  bool saw_minus = false;
  for (int i = 0; i < d.size(); ++i) {
    CHECK(std::fabs(a.m_at(i)) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(a.m_at(i) == b.m_at(i));
    (a.m_at(i) > 0 ? saw_plus : saw_minus) = true;
  }
  CHECK(saw_plus);
  CHECK(saw_minus);
  CHECK(a.eps_true() == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("spike objective hides its optimum off the visible domain") {
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain grid = ActionDomain::grid(1, 24, 0.0, 1.0);
  const MisspecifiedObjective obj = MisspecifiedObjective::make_spike(k, grid, 0.4, 10);
  CHECK(obj.domain().size() == 23);
  for (int i = 0; i < obj.domain().size(); ++i) {
    CHECK(obj.star_at(i) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(obj.tilde_at(i) >= 0.0);
  }
  CHECK(obj.star_optimum() == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(obj.tilde_optimum() == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(obj.eps_true() == doctest::Approx(0.2).epsilon(1e-15));
  // The hidden point is gone from the visible grid.
  for (int i = 0; i < obj.domain().size(); ++i) {
    CHECK(obj.domain().point(i) != grid.point(10));
  }
}

TEST_CASE("spike construction rejects bad geometry") {
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain grid = ActionDomain::grid(1, 8, 0.0, 1.0);
  CHECK_THROWS_AS((void)MisspecifiedObjective::make_spike(k, grid, 0.0, 3), gpb::InvalidParameter);
  CHECK_THROWS_AS((void)MisspecifiedObjective::make_spike(k, grid, 0.4, 8), gpb::InvalidParameter);
  CHECK_THROWS_AS((void)MisspecifiedObjective::make_spike(k, grid, 0.4, -1), gpb::InvalidParameter);
  CHECK_THROWS_AS((void)MisspecifiedObjective::make_spike(KernelSpec::linear(), grid, 0.4, 3),
                  gpb::InvalidParameter);
}

TEST_CASE("observations share one noise draw when paired") {
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain d = ActionDomain::grid(1, 12, 0.0, 1.0);
  const RkhsFunction f = synthesize_rkhs(k, d, 4, 1.0, 5);
  const MisspecifiedObjective obj(f, 0.0, MisspecSinusoid{0.15, {3.0}}, d);
  const NoiseModel noise(0.3);
  SplitMix64 a(71);
  SplitMix64 b(71);
  for (int i = 0; i < 12; ++i) {
    const auto [y_star, y_tilde] = gpb::observe_paired(obj, noise, i, a);
    CHECK(y_star - y_tilde == doctest::Approx(obj.m_at(i)).epsilon(1e-12));
    // The single (true-function) observation consumes the same noise.
    CHECK(gpb::observe(obj, noise, i, b) == y_star);
  }
}

TEST_CASE("noiseless observation still consumes a noise draw") {
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain d = ActionDomain::grid(1, 12, 0.0, 1.0);
  const RkhsFunction f = synthesize_rkhs(k, d, 4, 1.0, 5);
  const MisspecifiedObjective obj(f, 0.0, gpb::MisspecNone{}, d);
  SplitMix64 a(13);
  SplitMix64 b(13);
  CHECK(gpb::observe(obj, NoiseModel(0.0), 2, a) == doctest::Approx(obj.star_at(2)));
  (void)gpb::observe(obj, NoiseModel(1.0), 2, b);
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("context pools are validated and sampled deterministically") {
  const auto pool = gpb::ContextDistribution::uniform_random_pool(6, 4, 20, 77);
  SplitMix64 a(9);
  SplitMix64 b(9);
  for (int i = 0; i < 30; ++i) {
    const std::vector<int>& sa = pool.sample(a);
    CHECK(sa.size() == 4);
    for (const int idx : sa) {
      CHECK(idx >= 0);
      CHECK(idx < 20);
    }
    CHECK(sa == pool.sample(b));
  }
  CHECK_THROWS_AS((void)gpb::ContextDistribution::uniform_random_pool(0, 4, 20, 1),
                  gpb::InvalidParameter);
  CHECK_THROWS_AS((void)gpb::ContextDistribution::uniform_random_pool(3, 0, 20, 1),
                  gpb::InvalidParameter);
  CHECK_THROWS_AS((void)gpb::ContextDistribution::uniform_random_pool(3, 21, 20, 1),
                  gpb::InvalidParameter);
}

TEST_CASE("compensated accumulator survives catastrophic cancellation") {
  gpb::KahanSum s;
  s.add(1.0);
  for (int i = 0; i < 10; ++i) s.add(1e16);
  for (int i = 0; i < 10; ++i) s.add(-1e16);
  CHECK(s.value() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("regret rows use subset optima for restricted rounds") {
  const KernelSpec k = KernelSpec::squared_exponential(0.25);
  const ActionDomain d = ActionDomain::grid(1, 10, 0.0, 1.0);
  const RkhsFunction f = synthesize_rkhs(k, d, 4, 1.5, 21);
  const MisspecifiedObjective obj(f, 0.0, MisspecSinusoid{0.1, {2.0}}, d);

  gpb::RegretTrace trace;
  std::vector<int> all(static_cast<std::size_t>(d.size()));
  for (int i = 0; i < d.size(); ++i) all[static_cast<std::size_t>(i)] = i;
  trace.record_round(obj, all, 3, 0.5);
  const gpb::TraceRow& full_row = trace.rows().back();
  CHECK(full_row.round == 1);
  CHECK(full_row.action_index == 3);
  CHECK(full_row.inst_regret_star ==
        doctest::Approx(obj.star_optimum() - obj.star_at(3)).epsilon(1e-12));

  // Restricted round: the comparison point is the best index inside the set.
  const std::vector<int> subset{2, 5, 7};
  double best = obj.star_at(2);
  for (const int i : subset) best = std::max(best, obj.star_at(i));
  trace.record_round(obj, subset, 5, 0.1);
  const gpb::TraceRow& sub_row = trace.rows().back();
  CHECK(sub_row.round == 2);
  CHECK(sub_row.inst_regret_star == doctest::Approx(best - obj.star_at(5)).epsilon(1e-12));
  CHECK(trace.cum_regret_star() ==
        doctest::Approx(full_row.inst_regret_star + sub_row.inst_regret_star).epsilon(1e-12));
}

TEST_CASE("benchmark and true regret stay within twice the gap bound") {
  // Two points far apart under a short lengthscale, with a sinusoid whose
  // zero crossing sits on the first point: the regret difference per round is
  // exactly the amplitude at the second point.
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain d(1, {{0.0}, {1.0}});
  const RkhsFunction f(k, {{0.0}}, {1.0});
  const MisspecifiedObjective obj(f, 0.0, MisspecSinusoid{0.2, {0.25}}, d);
  gpb::RegretTrace trace;
  const std::vector<int> all{0, 1};
  trace.record_round(obj, all, 1, 0.0);
  trace.record_round(obj, all, 1, 0.0);
  CHECK_NOTHROW(trace.validate_misspec_gap(obj.eps_true()));
  CHECK_THROWS_AS(trace.validate_misspec_gap(0.0), gpb::NumericalBreakdown);
}

TEST_CASE("hidden-spike regret counts the unreachable optimum every round") {
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain grid = ActionDomain::grid(1, 24, 0.0, 1.0);
  const MisspecifiedObjective obj = MisspecifiedObjective::make_spike(k, grid, 0.4, 10);
  gpb::RegretTrace trace;
  std::vector<int> all(static_cast<std::size_t>(obj.domain().size()));
  for (int i = 0; i < obj.domain().size(); ++i) all[static_cast<std::size_t>(i)] = i;
  for (int r = 0; r < 5; ++r) trace.record_round(obj, all, r, 0.0);
  // Every visible point has true value 0, so each round pays the full height.
  CHECK(trace.cum_regret_star() == doctest::Approx(5 * 0.4).epsilon(1e-12));
}

TEST_CASE("excessive gap at construction is rejected") {
  // A sign pattern with amplitude above the verified bound cannot happen, but
  // mismatched frequency dimensions and negative amplitudes are caught.
  const KernelSpec k = KernelSpec::squared_exponential(0.2);
  const ActionDomain d = ActionDomain::grid(1, 8, 0.0, 1.0);
  const RkhsFunction f = synthesize_rkhs(k, d, 3, 1.0, 2);
  CHECK_THROWS_AS(MisspecifiedObjective(f, 0.0, MisspecSinusoid{-0.1, {2.0}}, d),
                  gpb::InvalidParameter);
  CHECK_THROWS_AS(MisspecifiedObjective(f, 0.0, MisspecSinusoid{0.1, {2.0, 3.0}}, d),
                  gpb::DimensionMismatch);
  CHECK_THROWS_AS(MisspecifiedObjective(f, 0.0, gpb::MisspecSpike{0.4, 3}, d),
                  gpb::InvalidParameter);
}
