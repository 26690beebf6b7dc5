#include "eegart/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "eegart/error.hpp"
#include "eegart/rng.hpp"

namespace eegart {

double rms(std::span<const double> signal) {
  if (signal.empty()) fail(ErrorCode::EmptySignal, "rms of an empty signal");
  double sum_sq = 0.0;
  for (double v : signal) sum_sq += v * v;
  return std::sqrt(sum_sq / static_cast<double>(signal.size()));
}

double snr_db(std::span<const double> clean, std::span<const double> scaled_noise) {
  return 20.0 * std::log10(rms(clean) / rms(scaled_noise));
}

double lambda_for_snr(std::span<const double> x, std::span<const double> eta, double snr) {
  if (!std::isfinite(snr)) fail(ErrorCode::ConfigError, "target SNR must be finite");
  const double rms_x = rms(x);
  const double rms_eta = rms(eta);
  if (!(rms_x > 0.0) || !(rms_eta > 0.0)) {
    fail(ErrorCode::DegenerateSignal, "lambda_for_snr needs signals with positive RMS");
  }
  return rms_x / (rms_eta * std::pow(10.0, snr / 20.0));
}

Segment mix_segments(const Segment& x, const Segment& eta, double lambda) {
  if (x.samples.size() != eta.samples.size()) {
    fail(ErrorCode::LengthMismatch, "mix_segments: " + std::to_string(x.samples.size()) +
                                        " vs " + std::to_string(eta.samples.size()) + " samples");
  }
  Segment y{x.samples, eta.label};
  for (std::size_t i = 0; i < y.samples.size(); ++i) y.samples[i] += lambda * eta.samples[i];
  return y;
}

std::vector<double> gen_white_noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed, Stream::WhiteNoise);
  std::vector<double> w(n);
  for (double& v : w) v = rng.gaussian();
  return w;
}

namespace {

void add_scaled(std::vector<double>& y, std::span<const double> x, std::span<const double> noise,
                double snr) {
  if (std::isinf(snr) && snr > 0.0) return;
  if (noise.size() != y.size()) fail(ErrorCode::LengthMismatch, "compose_mixed: noise length");
  const double lambda = lambda_for_snr(x, noise, snr);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += lambda * noise[i];
}

}  // namespace

Segment compose_mixed(std::span<const double> x, NoiseSource dominant, NoiseSource subdominant,
                      double snr_dominant_db, double snr_subdominant_db, double snr_white_db,
                      std::uint64_t seed) {
  const auto is_artifact = [](NoiseKind k) { return k == NoiseKind::EOG || k == NoiseKind::EMG; };
  if (!is_artifact(dominant.kind) || !is_artifact(subdominant.kind)) {
    fail(ErrorCode::ConfigError, "compose_mixed: dominant/subdominant must be EOG or EMG");
  }
  if (dominant.kind == subdominant.kind) {
    fail(ErrorCode::SameKind, "compose_mixed: dominant and subdominant are both " +
                                  std::string(to_string(dominant.kind)));
  }
  Segment y{std::vector<double>(x.begin(), x.end()), label_for(dominant.kind)};
  add_scaled(y.samples, x, dominant.samples, snr_dominant_db);
  add_scaled(y.samples, x, subdominant.samples, snr_subdominant_db);
  if (!(std::isinf(snr_white_db) && snr_white_db > 0.0)) {
    const auto white = gen_white_noise(x.size(), seed);
    add_scaled(y.samples, x, white, snr_white_db);
  }
  return y;
}

std::vector<double> normalize_samples(std::span<const double> y) {
  if (y.empty()) fail(ErrorCode::EmptySignal, "normalize of an empty signal");
  const double n = static_cast<double>(y.size());
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= n;

  std::vector<double> out(y.size());
  double sum_sq = 0.0;
  double max_abs = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = y[i] - mean;
    sum_sq += out[i] * out[i];
    max_abs = std::max(max_abs, std::abs(y[i]));
  }
  const double sd = std::sqrt(sum_sq / n);
  // Rounding in the mean leaves a residue on constant inputs.
  if (!(sd > 1e-14 * std::max(max_abs, std::numeric_limits<double>::min()))) {
    fail(ErrorCode::ConstantSignal, "segment has zero variance");
  }
  for (double& v : out) v /= sd;
  return out;
}

Segment normalize_segment(const Segment& y) {
  return Segment{normalize_samples(y.samples), y.label};
}

}  // namespace eegart
