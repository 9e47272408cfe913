#include "gpb/numerics.hpp"

#include <cmath>
#include <cstddef>
#include <string>

namespace gpb {

namespace {
std::size_t checked_extent(int rows, int cols) {
  if (rows < 0 || cols < 0) {
    throw InvalidParameter("Matrix: negative dimension");
  }
  return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
}
}  // namespace

Matrix::Matrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(checked_extent(rows, cols), fill) {}

std::vector<double> SpdFactor::forward_solve(std::span<const double> b) const {
  if (static_cast<int>(b.size()) != dim_) {
    throw DimensionMismatch("forward_solve: rhs length " + std::to_string(b.size()) +
                            " does not match factor dim " + std::to_string(dim_));
  }
  std::vector<double> y(b.begin(), b.end());
  const double* row = entries_.data();
  for (int i = 0; i < dim_; ++i, row += i) {
    double acc = y[i];
    for (int j = 0; j < i; ++j) acc -= row[j] * y[j];
    y[i] = acc / row[i];
  }
  return y;
}

std::vector<double> SpdFactor::backward_solve(std::span<const double> y) const {
  if (static_cast<int>(y.size()) != dim_) {
    throw DimensionMismatch("backward_solve: rhs length " + std::to_string(y.size()) +
                            " does not match factor dim " + std::to_string(dim_));
  }
  std::vector<double> x(y.begin(), y.end());
  for (int i = dim_ - 1; i >= 0; --i) {
    const std::size_t base = static_cast<std::size_t>(i) * (i + 1) / 2;
    x[i] /= entries_[base + i];
    // Push the solved component up through column i of L (= row i of L^T).
    for (int j = 0; j < i; ++j) x[j] -= entries_[base + j] * x[i];
  }
  return x;
}

double SpdFactor::log_det() const {
  double acc = 0.0;
  for (int i = 0; i < dim_; ++i) acc += std::log(at(i, i));
  return 2.0 * acc;
}

void SpdFactor::append_row(std::span<const double> sub, double diag) {
  if (static_cast<int>(sub.size()) != dim_) {
    throw DimensionMismatch("append_row: sub-row length " + std::to_string(sub.size()) +
                            " does not match factor dim " + std::to_string(dim_));
  }
  if (!(diag > 0.0)) {
    throw InvalidParameter("append_row: diagonal entry must be positive");
  }
  entries_.insert(entries_.end(), sub.begin(), sub.end());
  entries_.push_back(diag);
  ++dim_;
}

namespace {

// Plain in-place Cholesky attempt on the packed lower triangle of m + jitter*I.
// Returns false on a non-positive pivot (out keeps partial garbage).
bool try_factor(const Matrix& m, double jitter, std::vector<double>& out) {
  const int n = m.rows();
  out.resize(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int i = 0; i < n; ++i) {
    const std::size_t row_i = static_cast<std::size_t>(i) * (i + 1) / 2;
    for (int j = 0; j <= i; ++j) {
      const std::size_t row_j = static_cast<std::size_t>(j) * (j + 1) / 2;
      double acc = m(i, j);
      if (i == j) acc += jitter;
      for (int k = 0; k < j; ++k) acc -= out[row_i + k] * out[row_j + k];
      if (i == j) {
        if (!(acc > 0.0) || !std::isfinite(acc)) return false;
        out[row_i + j] = std::sqrt(acc);
      } else {
        out[row_i + j] = acc / out[row_j + j];
      }
    }
  }
  return true;
}

}  // namespace

SpdFactor cholesky_factor(const Matrix& m, double base_jitter) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("cholesky_factor: matrix is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", expected square");
  }
  if (base_jitter < 0.0 || !std::isfinite(base_jitter)) {
    throw InvalidParameter("cholesky_factor: base_jitter must be finite and >= 0");
  }
  const int n = m.rows();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      const double a = m(i, j);
      const double b = m(j, i);
      const double tol = 1e-10 * std::max({1.0, std::fabs(a), std::fabs(b)});
      if (std::fabs(a - b) > tol) {
        throw InvalidParameter("cholesky_factor: matrix asymmetric at (" + std::to_string(i) +
                               "," + std::to_string(j) + ")");
      }
    }
  }

  SpdFactor factor;
  factor.dim_ = n;
  if (try_factor(m, 0.0, factor.entries_)) {
    factor.jitter_ = 0.0;
    return factor;
  }
  for (int j = 0; j <= 6; ++j) {
    const double jitter = base_jitter * std::pow(10.0, j);
    if (jitter > 0.0 && try_factor(m, jitter, factor.entries_)) {
      factor.jitter_ = jitter;
      return factor;
    }
  }
  throw NotFactorizable("cholesky_factor: not positive definite after jitter up to " +
                        std::to_string(base_jitter * 1e6));
}

std::vector<double> solve_spd(const SpdFactor& factor, std::span<const double> rhs) {
  return factor.backward_solve(factor.forward_solve(rhs));
}

SpdFactor extend_factor(const SpdFactor& factor, std::span<const double> cross, double corner) {
  if (static_cast<int>(cross.size()) != factor.dim()) {
    throw DimensionMismatch("extend_factor: cross length " + std::to_string(cross.size()) +
                            " does not match factor dim " + std::to_string(factor.dim()));
  }
  const std::vector<double> sub = factor.forward_solve(cross);
  double pivot = corner;
  for (const double v : sub) pivot -= v * v;

  if (pivot > kPivotFloor) {
    SpdFactor extended = factor;
    extended.append_row(sub, std::sqrt(pivot));
    return extended;
  }

  // Degenerate corner: rebuild the represented matrix L L^T extended by
  // [cross, corner] and run the full jitter schedule on it.
  const int n = factor.dim();
  Matrix full(n + 1, n + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (int k = 0; k <= j; ++k) acc += factor.at(i, k) * factor.at(j, k);
      full(i, j) = acc;
      full(j, i) = acc;
    }
  }
  for (int i = 0; i < n; ++i) {
    full(n, i) = cross[i];
    full(i, n) = cross[i];
  }
  full(n, n) = corner;
  return cholesky_factor(full);
}

}  // namespace gpb
