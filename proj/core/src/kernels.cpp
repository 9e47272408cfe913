#include "gpb/kernels.hpp"

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>

namespace gpb {

KernelSpec KernelSpec::linear() { return KernelSpec(KernelFamily::kLinear, 1.0, 0.0); }

KernelSpec KernelSpec::squared_exponential(double lengthscale) {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw InvalidParameter("KernelSpec: lengthscale must be finite and positive");
  }
  return KernelSpec(KernelFamily::kSquaredExponential, lengthscale, 0.0);
}

KernelSpec KernelSpec::matern(double smoothness, double lengthscale) {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw InvalidParameter("KernelSpec: lengthscale must be finite and positive");
  }
  if (smoothness != 0.5 && smoothness != 1.5 && smoothness != 2.5) {
    throw InvalidParameter("KernelSpec: smoothness must be one of 0.5, 1.5, 2.5");
  }
  return KernelSpec(KernelFamily::kMatern, lengthscale, smoothness);
}

double kernel_eval(const KernelSpec& kernel, std::span<const double> x,
                   std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DimensionMismatch("kernel_eval: point dimensions " + std::to_string(x.size()) +
                            " and " + std::to_string(y.size()) + " differ");
  }
  switch (kernel.family()) {
    case KernelFamily::kLinear: {
      double dot = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
      return dot;
    }
    case KernelFamily::kSquaredExponential: {
      double sq = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        sq += d * d;
      }
      const double l = kernel.lengthscale();
      return std::exp(-sq / (2.0 * l * l));
    }
    case KernelFamily::kMatern: {
      double sq = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        sq += d * d;
      }
      const double r = std::sqrt(sq);
      const double l = kernel.lengthscale();
      if (kernel.smoothness() == 0.5) {
        return std::exp(-r / l);
      }
      if (kernel.smoothness() == 1.5) {
        const double s = std::sqrt(3.0) * r / l;
        return (1.0 + s) * std::exp(-s);
      }
      const double s = std::sqrt(5.0) * r / l;
      return (1.0 + s + 5.0 * sq / (3.0 * l * l)) * std::exp(-s);
    }
  }
  throw InvalidParameter("kernel_eval: unknown kernel family");
}

Matrix gram_matrix(const KernelSpec& kernel, const std::vector<std::vector<double>>& points) {
  const int n = static_cast<int>(points.size());
  Matrix gram(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = kernel_eval(kernel, points[i], points[j]);
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  return gram;
}

namespace {

void check_distinct(const std::vector<std::vector<double>>& points) {
  const int n = static_cast<int>(points.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double gap = 0.0;
      for (std::size_t k = 0; k < points[i].size(); ++k) {
        gap = std::max(gap, std::fabs(points[i][k] - points[j][k]));
      }
      if (gap < 1e-12) {
        throw InvalidParameter("ActionDomain: points " + std::to_string(i) + " and " +
                               std::to_string(j) + " coincide (max-norm gap < 1e-12)");
      }
    }
  }
}

}  // namespace

ActionDomain::ActionDomain(int dimension, std::vector<std::vector<double>> points)
    : dimension_(dimension), points_(std::move(points)) {
  if (dimension_ <= 0) {
    throw InvalidParameter("ActionDomain: dimension must be positive");
  }
  if (points_.empty()) {
    throw EmptyActionSet("ActionDomain: point list is empty");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (static_cast<int>(points_[i].size()) != dimension_) {
      throw DimensionMismatch("ActionDomain: point " + std::to_string(i) + " has dimension " +
                              std::to_string(points_[i].size()) + ", expected " +
                              std::to_string(dimension_));
    }
    for (const double x : points_[i]) {
      if (!std::isfinite(x)) {
        throw InvalidParameter("ActionDomain: point " + std::to_string(i) +
                               " has a non-finite coordinate");
      }
    }
  }
  check_distinct(points_);
}

ActionDomain ActionDomain::grid(int dimension, int points_per_axis, double lower, double upper) {
  if (dimension <= 0) throw InvalidParameter("ActionDomain::grid: dimension must be positive");
  if (points_per_axis <= 0) {
    throw InvalidParameter("ActionDomain::grid: points_per_axis must be positive");
  }
  if (!(lower < upper)) {
    throw InvalidParameter("ActionDomain::grid: lower bound must be below upper bound");
  }
  std::vector<double> axis(points_per_axis);
  if (points_per_axis == 1) {
    axis[0] = 0.5 * (lower + upper);
  } else {
    for (int i = 0; i < points_per_axis; ++i) {
      axis[i] = lower + (upper - lower) * static_cast<double>(i) / (points_per_axis - 1);
    }
  }
  std::size_t total = 1;
  for (int d = 0; d < dimension; ++d) total *= static_cast<std::size_t>(points_per_axis);
  std::vector<std::vector<double>> points;
  points.reserve(total);
  for (std::size_t index = 0; index < total; ++index) {
    std::vector<double> p(dimension);
    std::size_t rem = index;
    for (int d = dimension - 1; d >= 0; --d) {
      p[d] = axis[rem % points_per_axis];
      rem /= points_per_axis;
    }
    points.push_back(std::move(p));
  }
  return ActionDomain(dimension, std::move(points));
}

ActionDomain ActionDomain::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidParameter("ActionDomain::from_csv: cannot open file " + path);
  }
  std::vector<std::vector<double>> points;
  std::string line;
  bool first_line = true;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool parse_failed = false;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) throw std::invalid_argument("trailing characters");
        row.push_back(v);
      } catch (const std::exception&) {
        parse_failed = true;
        break;
      }
    }
    if (parse_failed) {
      if (first_line) {
        first_line = false;  // header row
        continue;
      }
      throw InvalidParameter("ActionDomain::from_csv: non-numeric cell in data row of " + path);
    }
    first_line = false;
    points.push_back(std::move(row));
  }
  if (points.empty()) {
    throw EmptyActionSet("ActionDomain::from_csv: no data rows in " + path);
  }
  const int dim = static_cast<int>(points.front().size());
  return ActionDomain(dim, std::move(points));
}

void ActionDomain::validate_for(const KernelSpec& kernel) const {
  if (kernel.family() != KernelFamily::kLinear) return;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    double sq = 0.0;
    for (const double c : points_[i]) sq += c * c;
    if (sq > 1.0 + 1e-12) {
      throw InvalidParameter("ActionDomain: point " + std::to_string(i) +
                             " lies outside the unit ball required by the linear kernel");
    }
  }
}

}  // namespace gpb
