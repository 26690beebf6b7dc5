#include "eegart/preprocess.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "eegart/error.hpp"

namespace eegart {

namespace {

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    fail(ErrorCode::LengthMismatch, std::string(what) + ": expected " + std::to_string(want) +
                                        " values, got " + std::to_string(got));
  }
}

std::vector<double> column_means(const Matrix& x) {
  std::vector<double> mean(x.cols, 0.0);
  for (std::size_t r = 0; r < x.rows; ++r) {
    const auto row = x.row(r);
    for (std::size_t c = 0; c < x.cols; ++c) mean[c] += row[c];
  }
  for (double& m : mean) m /= static_cast<double>(x.rows);
  return mean;
}

}  // namespace

Scaler fit_scaler(const Matrix& x) {
  if (x.rows < 2) fail(ErrorCode::TooFewRows, "scaler needs at least 2 rows");
  Scaler s;
  s.mean = column_means(x);
  s.std.assign(x.cols, 0.0);
  for (std::size_t r = 0; r < x.rows; ++r) {
    const auto row = x.row(r);
    for (std::size_t c = 0; c < x.cols; ++c) {
      const double d = row[c] - s.mean[c];
      s.std[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < x.cols; ++c) {
    s.std[c] = std::sqrt(s.std[c] / static_cast<double>(x.rows));
    if (!(s.std[c] > 0.0)) {
      s.std[c] = 1.0;
      s.clamped_columns.push_back(c);
    }
  }
  return s;
}

std::vector<double> Scaler::transform(std::span<const double> v) const {
  require_dim(v.size(), dim(), "scaler transform");
  std::vector<double> z(v.size());
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = (v[j] - mean[j]) / std[j];
  return z;
}

std::vector<double> Scaler::inverse(std::span<const double> z) const {
  require_dim(z.size(), dim(), "scaler inverse");
  std::vector<double> v(z.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = mean[j] + std[j] * z[j];
  return v;
}

Matrix Scaler::transform(const Matrix& x) const {
  require_dim(x.cols, dim(), "scaler transform");
  Matrix out(x.rows, x.cols);
  for (std::size_t r = 0; r < x.rows; ++r) {
    const auto in = x.row(r);
    auto dst = out.row(r);
    for (std::size_t j = 0; j < x.cols; ++j) dst[j] = (in[j] - mean[j]) / std[j];
  }
  return out;
}

double PcaModel::cumulative_ratio() const {
  const double kept = std::accumulate(explained_variance.begin(), explained_variance.end(), 0.0);
  return kept / total_variance;
}

std::vector<double> PcaModel::project(std::span<const double> z) const {
  require_dim(z.size(), dim(), "PCA projection");
  std::vector<double> centered(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) centered[j] = z[j] - mean[j];
  std::vector<double> scores(k(), 0.0);
  for (std::size_t i = 0; i < k(); ++i) {
    const auto comp = components.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < centered.size(); ++j) acc += comp[j] * centered[j];
    scores[i] = acc;
  }
  return scores;
}

Matrix PcaModel::project(const Matrix& z) const {
  Matrix out(z.rows, k());
  for (std::size_t r = 0; r < z.rows; ++r) {
    const auto scores = project(z.row(r));
    std::copy(scores.begin(), scores.end(), out.row(r).begin());
  }
  return out;
}

std::vector<double> PcaModel::reconstruct(std::span<const double> scores) const {
  require_dim(scores.size(), k(), "PCA reconstruction");
  std::vector<double> z = mean;
  for (std::size_t i = 0; i < k(); ++i) {
    const auto comp = components.row(i);
    for (std::size_t j = 0; j < z.size(); ++j) z[j] += scores[i] * comp[j];
  }
  return z;
}

PcaModel fit_pca(const Matrix& z, double variance_target) {
  if (z.rows < 2) fail(ErrorCode::TooFewRows, "PCA needs at least 2 rows");
  if (!(variance_target > 0.0) || variance_target > 1.0) {
    fail(ErrorCode::ConfigError, "PCA variance target must lie in (0, 1]");
  }
  const std::size_t n = z.rows;
  const std::size_t d = z.cols;

  PcaModel model;
  model.variance_target = variance_target;
  model.mean = column_means(z);

  Eigen::MatrixXd centered(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      centered(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = z(r, c) - model.mean[c];
    }
  }
  // d x d Gram route: memory stays bounded by the feature count.
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
  model.total_variance = cov.trace();
  if (!(model.total_variance > 0.0)) {
    fail(ErrorCode::RankDeficient, "data has zero total variance");
  }

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::RankDeficient, "eigendecomposition did not converge");
  }
  const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& vectors = solver.eigenvectors();

  std::size_t k = 0;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const auto idx = static_cast<Eigen::Index>(d - 1 - i);
    cumulative += std::max(values(idx), 0.0);
    if (cumulative / model.total_variance >= variance_target) {
      k = i + 1;
      break;
    }
  }
  const double noise_floor = 1e-12 * model.total_variance;
  if (k == 0 || values(static_cast<Eigen::Index>(d - k)) <= noise_floor) {
    fail(ErrorCode::RankDeficient, "too few non-zero principal components to reach the target");
  }

  model.components = Matrix(k, d);
  model.explained_variance.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto idx = static_cast<Eigen::Index>(d - 1 - i);
    model.explained_variance[i] = values(idx);
    std::size_t pivot = 0;
    for (std::size_t j = 1; j < d; ++j) {
      if (std::abs(vectors(static_cast<Eigen::Index>(j), idx)) >
          std::abs(vectors(static_cast<Eigen::Index>(pivot), idx))) {
        pivot = j;
      }
    }
    const double sign = vectors(static_cast<Eigen::Index>(pivot), idx) < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      model.components(i, j) = sign * vectors(static_cast<Eigen::Index>(j), idx);
    }
  }
  return model;
}

}  // namespace eegart
