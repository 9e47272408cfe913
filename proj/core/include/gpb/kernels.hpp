#pragma once

#include <span>
#include <string>
#include <vector>

#include "gpb/errors.hpp"
#include "gpb/numerics.hpp"

namespace gpb {

enum class KernelFamily { kLinear, kSquaredExponential, kMatern };

// Positive definite kernel with normalized scale: k(x, x) <= 1 everywhere
// the library admits (the linear kernel relies on the unit-ball domain check).
class KernelSpec {
 public:
  // k(x, y) = x . y, for actions inside the Euclidean unit ball.
  [[nodiscard]] static KernelSpec linear();

  // k(x, y) = exp(-|x - y|^2 / (2 l^2)).
  [[nodiscard]] static KernelSpec squared_exponential(double lengthscale);

  // Matern kernel with half-integer smoothness in {0.5, 1.5, 2.5} and
  // Euclidean distance r = |x - y|:
  //   0.5: exp(-r/l)
  //   1.5: (1 + sqrt(3) r/l) exp(-sqrt(3) r/l)
  //   2.5: (1 + sqrt(5) r/l + 5 r^2/(3 l^2)) exp(-sqrt(5) r/l)
  [[nodiscard]] static KernelSpec matern(double smoothness, double lengthscale);

  [[nodiscard]] KernelFamily family() const { return family_; }
  [[nodiscard]] double lengthscale() const { return lengthscale_; }
  [[nodiscard]] double smoothness() const { return smoothness_; }

 private:
  KernelSpec(KernelFamily family, double lengthscale, double smoothness)
      : family_(family), lengthscale_(lengthscale), smoothness_(smoothness) {}

  KernelFamily family_;
  double lengthscale_;
  double smoothness_;
};

// Evaluates k(x, y). Symmetric in its arguments down to the floating-point
// result: squared differences and products commute exactly, and coordinates
// are accumulated in a fixed order.
[[nodiscard]] double kernel_eval(const KernelSpec& kernel, std::span<const double> x,
                                 std::span<const double> y);

// Dense kernel matrix of the point list. The lower triangle is computed and
// mirrored, so the result is exactly symmetric.
[[nodiscard]] Matrix gram_matrix(const KernelSpec& kernel,
                                 const std::vector<std::vector<double>>& points);

// Finite action set. All points share one dimension and are pairwise
// distinct (max-norm gap >= 1e-12), checked at construction.
class ActionDomain {
 public:
  ActionDomain(int dimension, std::vector<std::vector<double>> points);

  // Regular hypercube grid with the same per-axis resolution and bounds on
  // every axis. Point index runs with the last axis fastest; a single-point
  // axis resolution places the coordinate at the interval midpoint.
  [[nodiscard]] static ActionDomain grid(int dimension, int points_per_axis, double lower,
                                         double upper);

  // Loads one point per row, comma separated, d columns; a first line that
  // does not parse as numbers is treated as a header and skipped.
  [[nodiscard]] static ActionDomain from_csv(const std::string& path);

  [[nodiscard]] int dimension() const { return dimension_; }
  [[nodiscard]] int size() const { return static_cast<int>(points_.size()); }
  [[nodiscard]] const std::vector<double>& point(int i) const { return points_[i]; }
  [[nodiscard]] const std::vector<std::vector<double>>& points() const { return points_; }

  // Kernel-dependent admissibility: the linear kernel additionally requires
  // every point inside the Euclidean unit ball.
  void validate_for(const KernelSpec& kernel) const;

 private:
  int dimension_;
  std::vector<std::vector<double>> points_;
};

}  // namespace gpb
