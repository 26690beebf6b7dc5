#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "eegart/matrix.hpp"

namespace eegart {

/// Per-feature standardization, z_j = (v_j - mean_j) / std_j.
struct Scaler {
  std::vector<double> mean;
  /// Population standard deviations; zero-variance columns are clamped to 1.
  std::vector<double> std;
  /// Columns whose standard deviation was clamped.
  std::vector<std::size_t> clamped_columns;

  std::size_t dim() const { return mean.size(); }
  std::vector<double> transform(std::span<const double> v) const;
  std::vector<double> inverse(std::span<const double> z) const;
  Matrix transform(const Matrix& x) const;
};

/// Column means and population standard deviations. Throws TooFewRows for N < 2.
Scaler fit_scaler(const Matrix& x);

struct PcaModel {
  std::vector<double> mean;
  /// k x d, orthonormal rows sorted by decreasing explained variance. Each
  /// row's largest-magnitude coordinate is positive (lowest index on ties).
  Matrix components;
  /// Population variance along each retained component, non-increasing.
  std::vector<double> explained_variance;
  /// Trace of the population covariance of the fitted data.
  double total_variance = 0.0;
  double variance_target = 0.95;

  std::size_t k() const { return components.rows; }
  std::size_t dim() const { return mean.size(); }
  double cumulative_ratio() const;

  std::vector<double> project(std::span<const double> z) const;
  Matrix project(const Matrix& z) const;
  /// mean + components^T * scores.
  std::vector<double> reconstruct(std::span<const double> scores) const;
};

/// Eigen-decomposes the population covariance of the centered data and keeps
/// the fewest components whose cumulative variance ratio reaches the target.
/// Throws TooFewRows, ConfigError (target outside (0, 1]) or RankDeficient.
PcaModel fit_pca(const Matrix& z, double variance_target = 0.95);

}  // namespace eegart
