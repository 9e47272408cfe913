#pragma once

#include <span>
#include <vector>

#include "gpb/errors.hpp"

namespace gpb {

// Minimal dense matrix, row-major storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0);

  [[nodiscard]] int rows() const { return rows_; }
  [[nodiscard]] int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Lower-triangular Cholesky factor of a symmetric positive definite matrix,
// possibly after adding jitter * I to make the factorization succeed.
//
// Stored as the packed row-major lower triangle (row i holds i+1 entries);
// row-major order keeps forward substitution cache-friendly.
class SpdFactor {
 public:
  SpdFactor() = default;

  [[nodiscard]] int dim() const { return dim_; }

  // Diagonal inflation applied by the factorization pass that produced this
  // factor (0 when the plain factorization succeeded).
  [[nodiscard]] double jitter_applied() const { return jitter_; }

  // Entry L(i, j) for j <= i; entries above the diagonal are zero by shape.
  [[nodiscard]] double at(int i, int j) const {
    return entries_[static_cast<std::size_t>(i) * (i + 1) / 2 + j];
  }

  // Solves L y = b (forward substitution).
  [[nodiscard]] std::vector<double> forward_solve(std::span<const double> b) const;

  // Solves L^T x = y (backward substitution).
  [[nodiscard]] std::vector<double> backward_solve(std::span<const double> y) const;

  // log det(L L^T) = 2 * sum of log diagonal entries.
  [[nodiscard]] double log_det() const;

  // Appends [sub^T, diag] as the new last row. `sub` must be the forward
  // solve of the cross-covariance column and `diag` the positive corner
  // pivot root; callers outside this module should prefer extend_factor,
  // which derives both and handles degenerate pivots.
  void append_row(std::span<const double> sub, double diag);

 private:
  friend SpdFactor cholesky_factor(const Matrix&, double);

  int dim_ = 0;
  double jitter_ = 0.0;
  std::vector<double> entries_;
};

inline constexpr double kDefaultBaseJitter = 1e-10;

// Pivot values at or below this threshold trigger the refactorization
// fallback inside extend_factor.
inline constexpr double kPivotFloor = 1e-12;

// Factorizes a symmetric matrix as L L^T, escalating diagonal jitter through
// the schedule base_jitter * 10^j (j = 0..6) when the plain attempt fails.
//
// Throws DimensionMismatch (non-square), InvalidParameter (asymmetric beyond
// 1e-10 relative tolerance), NotFactorizable (entire schedule exhausted).
[[nodiscard]] SpdFactor cholesky_factor(const Matrix& m, double base_jitter = kDefaultBaseJitter);

// Solves (L L^T) x = rhs via forward then backward substitution.
[[nodiscard]] std::vector<double> solve_spd(const SpdFactor& factor, std::span<const double> rhs);

// Factor of the represented matrix extended by one symmetric row/column
// [cross^T, corner]. Costs one forward solve plus a scalar square root; if
// the corner pivot is <= kPivotFloor, falls back to refactorizing the full
// extended matrix with the default jitter schedule.
[[nodiscard]] SpdFactor extend_factor(const SpdFactor& factor, std::span<const double> cross,
                                      double corner);

}  // namespace gpb
