#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "eegart/error.hpp"
#include "eegart/preprocess.hpp"
#include "eegart/rng.hpp"

using namespace eegart;

namespace {

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an eegart::Error");
  return ErrorCode::IoError;
}

// Correlated Gaussian data: x = A g with a fixed random mixing matrix.
Matrix correlated(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed, Stream::Split);
  Matrix a(d, d);
  for (double& v : a.data) v = rng.gaussian() * std::exp(rng.uniform(-2.0, 1.0));
  Matrix x(n, d);
  std::vector<double> g(d);
  for (std::size_t r = 0; r < n; ++r) {
    for (double& v : g) v = rng.gaussian();
    for (std::size_t i = 0; i < d; ++i) {
      double acc = 3.0 * static_cast<double>(i);
      for (std::size_t j = 0; j < d; ++j) acc += a(i, j) * g[j];
      x(r, i) = acc;
    }
  }
  return x;
}

Matrix covariance(const Matrix& x) {
  const std::size_t d = x.cols;
  std::vector<double> mean(d, 0.0);
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t j = 0; j < d; ++j) mean[j] += x(r, j) / static_cast<double>(x.rows);
  Matrix c(d, d);
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        c(i, j) += (x(r, i) - mean[i]) * (x(r, j) - mean[j]) / static_cast<double>(x.rows);
  return c;
}

double column_variance(const Matrix& x, std::size_t j) {
  double m = 0.0;
  for (std::size_t r = 0; r < x.rows; ++r) m += x(r, j);
  m /= static_cast<double>(x.rows);
  double s = 0.0;
  for (std::size_t r = 0; r < x.rows; ++r) s += (x(r, j) - m) * (x(r, j) - m);
  return s / static_cast<double>(x.rows);
}

}  // namespace

TEST_CASE("scaler uses population statistics") {
  Matrix x(2, 1);
  x(0, 0) = 0.0;
  x(1, 0) = 2.0;
  const Scaler s = fit_scaler(x);
  CHECK(s.mean[0] == 1.0);
  CHECK(s.std[0] == 1.0);
  CHECK(s.transform(std::vector<double>{2.0})[0] == 1.0);

  const Matrix data = correlated(300, 6, 1);
  const Scaler fitted = fit_scaler(data);
  const Matrix z = fitted.transform(data);
  for (std::size_t j = 0; j < 6; ++j) {
    double m = 0.0;
    for (std::size_t r = 0; r < z.rows; ++r) m += z(r, j);
    CHECK(std::abs(m / 300.0) < 1e-12);
    CHECK(std::abs(column_variance(z, j) - 1.0) < 1e-12);
  }
  std::vector<double> shifted(6);
  for (std::size_t j = 0; j < 6; ++j) shifted[j] = fitted.mean[j] + fitted.std[j];
  for (double v : fitted.transform(shifted)) CHECK(std::abs(v - 1.0) < 1e-12);
  for (double v : fitted.transform(fitted.mean)) CHECK(v == 0.0);
  const auto back = fitted.inverse(z.row(17));
  for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(back[j] - data(17, j)) < 1e-10 * (1 + std::abs(data(17, j))));
}

TEST_CASE("scaler clamps zero-variance columns") {
  Matrix x(4, 3);
  for (std::size_t r = 0; r < 4; ++r) {
    x(r, 0) = static_cast<double>(r);
    x(r, 1) = 5.0;
    x(r, 2) = -static_cast<double>(r * r);
  }
  const Scaler s = fit_scaler(x);
  CHECK(s.std[1] == 1.0);
  CHECK(s.clamped_columns == std::vector<std::size_t>{1});
  const Matrix z = s.transform(x);
  for (std::size_t r = 0; r < 4; ++r) CHECK(z(r, 1) == 0.0);

  CHECK(error_of([] { fit_scaler(Matrix(1, 3)); }) == ErrorCode::TooFewRows);
}

TEST_CASE("pca of rank-two data keeps two components") {
  Rng rng(2, Stream::Split);
  const std::vector<double> u = {1, 2, 0, -1, 0.5};
  const std::vector<double> v = {0, 1, 1, 1, -2};
  Matrix x(200, 5);
  for (std::size_t r = 0; r < 200; ++r) {
    const double a = 3.0 * rng.gaussian(), b = rng.gaussian();
    for (std::size_t j = 0; j < 5; ++j) x(r, j) = a * u[j] + b * v[j];
  }
  const PcaModel p = fit_pca(x, 0.95);
  CHECK(p.k() == 2);
  CHECK(p.cumulative_ratio() == doctest::Approx(1.0).epsilon(1e-12));
  const Matrix scores = p.project(x);
  for (std::size_t r = 0; r < 200; ++r) {
    const auto rec = p.reconstruct(scores.row(r));
    for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(rec[j] - x(r, j)) < 1e-9);
  }
}

TEST_CASE("pca components are orthonormal eigenvectors of the covariance") {
  const Matrix x = correlated(500, 10, 3);
  const Matrix c = covariance(x);
  const PcaModel p = fit_pca(x, 0.95);
  REQUIRE(p.k() >= 1);
  CHECK(p.k() <= 10);

  double trace = 0.0;
  for (std::size_t i = 0; i < 10; ++i) trace += c(i, i);
  CHECK(p.total_variance == doctest::Approx(trace).epsilon(1e-12));

  for (std::size_t a = 0; a < p.k(); ++a) {
    for (std::size_t b = 0; b < p.k(); ++b) {
      double dot = 0.0;
      for (std::size_t j = 0; j < 10; ++j) dot += p.components(a, j) * p.components(b, j);
      CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-10);
    }
    double residual = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
      double cv = 0.0;
      for (std::size_t j = 0; j < 10; ++j) cv += c(i, j) * p.components(a, j);
      residual = std::max(residual, std::abs(cv - p.explained_variance[a] * p.components(a, i)));
    }
    CHECK(residual < 1e-9 * trace);

    std::size_t arg = 0;
    for (std::size_t j = 1; j < 10; ++j)
      if (std::abs(p.components(a, j)) > std::abs(p.components(a, arg))) arg = j;
    CHECK(p.components(a, arg) > 0.0);
    if (a > 0) CHECK(p.explained_variance[a] <= p.explained_variance[a - 1]);
  }

  // power iteration for the leading eigenvalue
  std::vector<double> q(10, 1.0);
  double lambda = 0.0;
  for (int it = 0; it < 2000; ++it) {
    std::vector<double> next(10, 0.0);
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 10; ++j) next[i] += c(i, j) * q[j];
    const double norm = std::sqrt(std::inner_product(next.begin(), next.end(), next.begin(), 0.0));
    for (std::size_t i = 0; i < 10; ++i) q[i] = next[i] / norm;
    lambda = norm;
  }
  CHECK(p.explained_variance[0] == doctest::Approx(lambda).epsilon(1e-9));
}

TEST_CASE("pca keeps the fewest components reaching the variance target") {
  const Matrix x = correlated(400, 12, 4);
  const PcaModel full = fit_pca(x, 1.0);
  REQUIRE(full.k() == 12);
  for (double target : {0.5, 0.8, 0.9, 0.95, 0.99}) {
    const PcaModel p = fit_pca(x, target);
    CAPTURE(target);
    double cum = 0.0;
    std::size_t expected_k = 0;
    while (cum / full.total_variance < target) cum += full.explained_variance[expected_k++];
    CHECK(p.k() == expected_k);
    CHECK(p.cumulative_ratio() >= target);
  }
}

TEST_CASE("pca projection variances and reconstruction error") {
  const Matrix x = correlated(600, 8, 5);
  const PcaModel p = fit_pca(x, 0.9);
  for (double v : p.project(p.mean)) CHECK(v == 0.0);
  const Matrix scores = p.project(x);
  for (std::size_t a = 0; a < p.k(); ++a) {
    CHECK(column_variance(scores, a) == doctest::Approx(p.explained_variance[a]).epsilon(1e-9));
  }
  double mse = 0.0;
  for (std::size_t r = 0; r < x.rows; ++r) {
    const auto rec = p.reconstruct(scores.row(r));
    for (std::size_t j = 0; j < 8; ++j) mse += (rec[j] - x(r, j)) * (rec[j] - x(r, j));
  }
  mse /= static_cast<double>(x.rows);
  const double kept = std::accumulate(p.explained_variance.begin(), p.explained_variance.end(), 0.0);
  CHECK(mse == doctest::Approx(p.total_variance - kept).epsilon(1e-8));
}

TEST_CASE("pca error conditions") {
  CHECK(error_of([] { fit_pca(Matrix(1, 4)); }) == ErrorCode::TooFewRows);
  const Matrix x = correlated(50, 4, 6);
  CHECK(error_of([&] { fit_pca(x, 0.0); }) == ErrorCode::ConfigError);
  CHECK(error_of([&] { fit_pca(x, 1.5); }) == ErrorCode::ConfigError);
  CHECK(error_of([] { fit_pca(Matrix(10, 4, 2.0)); }) == ErrorCode::RankDeficient);
}
