#include <cmath>
#include <vector>

#include "doctest.h"
#include "gpb/errors.hpp"
#include "gpb/numerics.hpp"
#include "helpers.hpp"

using gpb::cholesky_factor;
using gpb::DimensionMismatch;
using gpb::InvalidParameter;
using gpb::Matrix;
using gpb::NotFactorizable;
using gpb::solve_spd;
using gpb::SpdFactor;
using gpb::SplitMix64;

TEST_CASE("cholesky factors a 2x2 matrix to its closed-form triangle") {
  Matrix m(2, 2);
  m(0, 0) = 4.0;
  m(0, 1) = 2.0;
  m(1, 0) = 2.0;
  m(1, 1) = 3.0;
  const SpdFactor f = cholesky_factor(m);
  CHECK(f.dim() == 2);
  CHECK(f.jitter_applied() == 0.0);
  CHECK(f.at(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(f.at(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.at(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(f.log_det() == doctest::Approx(std::log(8.0)).epsilon(1e-12));
}

TEST_CASE("cholesky rejects an indefinite matrix after exhausting jitter") {
  Matrix m(2, 2);
  m(0, 0) = 1.0;
  m(0, 1) = 2.0;
  m(1, 0) = 2.0;
  m(1, 1) = 1.0;
  CHECK_THROWS_AS((void)cholesky_factor(m), NotFactorizable);
}

TEST_CASE("cholesky validates shape and symmetry") {
  CHECK_THROWS_AS((void)cholesky_factor(Matrix(2, 3)), DimensionMismatch);
  Matrix m(2, 2);
  m(0, 0) = 1.0;
  m(0, 1) = 0.5;
  m(1, 0) = 0.4;
  m(1, 1) = 1.0;
  CHECK_THROWS_AS((void)cholesky_factor(m), InvalidParameter);
}

TEST_CASE("solve_spd inverts the 2x2 example exactly enough") {
  Matrix m(2, 2);
  m(0, 0) = 4.0;
  m(0, 1) = 2.0;
  m(1, 0) = 2.0;
  m(1, 1) = 3.0;
  const SpdFactor f = cholesky_factor(m);
  const std::vector<double> rhs{10.0, 8.0};
  const std::vector<double> x = solve_spd(f, rhs);
  // Solution of [[4,2],[2,3]] x = [10,8] is [7/4, 3/2].
  CHECK(x[0] == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("forward and backward solves validate rhs length") {
  Matrix m(1, 1);
  m(0, 0) = 1.0;
  const SpdFactor f = cholesky_factor(m);
  const std::vector<double> bad{1.0, 2.0};
  CHECK_THROWS_AS((void)f.forward_solve(bad), DimensionMismatch);
  CHECK_THROWS_AS((void)f.backward_solve(bad), DimensionMismatch);
}

TEST_CASE("extend_factor grows an empty factor into a 1x1 root") {
  const SpdFactor f = gpb::extend_factor(SpdFactor{}, {}, 4.0);
  CHECK(f.dim() == 1);
  CHECK(f.at(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("extend_factor refactorizes with jitter when the pivot collapses") {
  Matrix id(2, 2);
  id(0, 0) = 1.0;
  id(1, 1) = 1.0;
  const SpdFactor f = cholesky_factor(id);
  // Appending a duplicate of row 0 makes the extended matrix singular, so the
  // incremental pivot hits the floor and the full refactorization must kick in.
  const std::vector<double> cross{1.0, 0.0};
  const SpdFactor g = gpb::extend_factor(f, cross, 1.0);
  CHECK(g.dim() == 3);
  CHECK(g.jitter_applied() > 0.0);
  const Matrix p = gpb::testing::factor_product(g);
  CHECK(std::fabs(p(2, 0) - 1.0) < 1e-3);
  CHECK(std::fabs(p(2, 1) - 0.0) < 1e-3);
  CHECK(std::fabs(p(2, 2) - 1.0) < 1e-3);
}

TEST_CASE("extend_factor validates the cross length") {
  Matrix id(2, 2);
  id(0, 0) = 1.0;
  id(1, 1) = 1.0;
  const SpdFactor f = cholesky_factor(id);
  const std::vector<double> cross{1.0};
  CHECK_THROWS_AS((void)gpb::extend_factor(f, cross, 1.0), DimensionMismatch);
}

TEST_CASE("append_row validates sub-row length and diagonal sign") {
  SpdFactor f;
  f.append_row({}, 1.0);
  const std::vector<double> wrong{1.0, 2.0};
  CHECK_THROWS_AS(f.append_row(wrong, 1.0), DimensionMismatch);
  const std::vector<double> sub{0.5};
  CHECK_THROWS_AS(f.append_row(sub, 0.0), InvalidParameter);
  CHECK_THROWS_AS(f.append_row(sub, -1.0), InvalidParameter);
}

TEST_CASE("random SPD matrices factor, reconstruct, and solve accurately") {
  SplitMix64 rng(12345);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(40));
    const Matrix a = gpb::testing::random_spd(n, rng);
    const SpdFactor f = cholesky_factor(a);
    REQUIRE(f.dim() == n);
    CHECK(f.jitter_applied() == 0.0);

    const Matrix p = gpb::testing::factor_product(f);
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::fabs(a(i, i)));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        CHECK(std::fabs(p(i, j) - a(i, j)) <= 1e-8 * (1.0 + scale));
      }
    }

    std::vector<double> x_true(n);
    for (double& v : x_true) v = rng.gaussian();
    std::vector<double> b(n, 0.0);
    double xmax = 0.0;
    for (int i = 0; i < n; ++i) {
      xmax = std::max(xmax, std::fabs(x_true[i]));
      for (int j = 0; j < n; ++j) b[i] += a(i, j) * x_true[j];
    }
    const std::vector<double> x = solve_spd(f, b);
    for (int i = 0; i < n; ++i) {
      // Eigenvalues span [1e-3, 1e3], so the condition number caps near 1e6
      // and the solve keeps roughly ten accurate digits.
      CHECK(std::fabs(x[i] - x_true[i]) <= 1e-6 * (1.0 + xmax));
    }
  }
}

TEST_CASE("incremental extension matches the one-shot factorization") {
  SplitMix64 rng(777);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(20));
    const Matrix a = gpb::testing::random_spd(n, rng, 1e-2, 1e2);
    SpdFactor inc;
    for (int k = 0; k < n; ++k) {
      std::vector<double> cross(static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j) cross[static_cast<std::size_t>(j)] = a(k, j);
      inc = gpb::extend_factor(inc, cross, a(k, k));
    }
    const SpdFactor full = cholesky_factor(a);
    REQUIRE(inc.dim() == n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        CHECK(std::fabs(inc.at(i, j) - full.at(i, j)) <= 1e-8 * (1.0 + std::fabs(full.at(i, j))));
      }
    }
    CHECK(std::fabs(inc.log_det() - full.log_det()) <= 1e-8 * (1.0 + std::fabs(full.log_det())));
  }
}

TEST_CASE("matrix constructor rejects negative dimensions") {
  CHECK_THROWS_AS((void)Matrix(-1, 2), InvalidParameter);
}
