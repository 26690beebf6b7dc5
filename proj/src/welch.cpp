#include "eegart/welch.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "eegart/error.hpp"

namespace eegart {

void PsdConfig::validate(std::size_t signal_length) const {
  if (!(sample_rate_hz > 0.0)) fail(ErrorCode::ConfigError, "sample rate must be positive");
  if (segment_length < 2 || segment_length > signal_length) {
    fail(ErrorCode::ConfigError, "Welch segment_length " + std::to_string(segment_length) +
                                     " must lie in [2, " + std::to_string(signal_length) + "]");
  }
  if (overlap >= segment_length) {
    fail(ErrorCode::ConfigError, "Welch overlap must be smaller than segment_length");
  }
  if (bins_kept == 0 || bins_kept > segment_length / 2 + 1) {
    fail(ErrorCode::ConfigError, "cannot keep " + std::to_string(bins_kept) +
                                     " bins from a one-sided spectrum of " +
                                     std::to_string(segment_length / 2 + 1));
  }
  if (!(log_epsilon > 0.0)) fail(ErrorCode::ConfigError, "log_epsilon must be positive");
}

std::vector<double> hann_window(std::size_t n) {
  if (n < 2) fail(ErrorCode::ConfigError, "Hann window needs n >= 2");
  std::vector<double> w(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / denom));
  }
  return w;
}

void fft(std::vector<std::complex<double>>& data) {
  const std::size_t n = data.size();
  if (n < 2) return;
  if ((n & (n - 1)) != 0) {
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<double> acc = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) /
                             static_cast<double>(n);
        acc += data[t] * std::polar(1.0, angle);
      }
      out[k] = acc;
    }
    data = std::move(out);
    return;
  }

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::size_t half = len / 2;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        // Twiddles are evaluated directly rather than by recurrence.
        const std::complex<double> w = std::polar(1.0, angle * static_cast<double>(k));
        const auto u = data[start + k];
        const auto v = data[start + k + half] * w;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
}

std::vector<double> welch_psd(std::span<const double> x, const PsdConfig& config) {
  config.validate(x.size());
  const std::size_t len = config.segment_length;
  const std::size_t step = len - config.overlap;
  const std::size_t blocks = (x.size() - len) / step + 1;
  const std::size_t one_sided = len / 2 + 1;

  const auto window = hann_window(len);
  double window_power = 0.0;
  for (double w : window) window_power += w * w;
  const double scale = 1.0 / (config.sample_rate_hz * window_power);

  std::vector<double> psd(one_sided, 0.0);
  std::vector<std::complex<double>> buffer(len);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t start = b * step;
    for (std::size_t i = 0; i < len; ++i) buffer[i] = x[start + i] * window[i];
    fft(buffer);
    for (std::size_t k = 0; k < one_sided; ++k) psd[k] += std::norm(buffer[k]);
  }

  // Bin 0 and, for even lengths, the Nyquist bin have no mirror image.
  const std::size_t last_interior = len % 2 == 0 ? one_sided - 1 : one_sided;
  for (std::size_t k = 0; k < one_sided; ++k) {
    const double fold = (k > 0 && k < last_interior) ? 2.0 : 1.0;
    psd[k] *= fold * scale / static_cast<double>(blocks);
  }
  psd.resize(config.bins_kept);
  return psd;
}

}  // namespace eegart
