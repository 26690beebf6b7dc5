#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace eegart {

struct PsdConfig {
  double sample_rate_hz = 256.0;
  /// Samples per Welch block; 256 at 256 Hz gives 1 Hz bins.
  std::size_t segment_length = 256;
  std::size_t overlap = 128;
  std::size_t bins_kept = 80;
  double log_epsilon = 1e-12;

  /// Throws ConfigError for an invalid combination on `signal_length` samples.
  void validate(std::size_t signal_length) const;
};

/// Symmetric Hann window, w[k] = 0.5 (1 - cos(2 pi k / (n - 1))). n >= 2.
std::vector<double> hann_window(std::size_t n);

/// In-place FFT. Radix-2 for power-of-two sizes, direct DFT otherwise.
void fft(std::vector<std::complex<double>>& data);

/// One-sided Welch PSD (power per Hz) of `x`, first `bins_kept` bins.
/// Blocks are Hann-windowed without detrending; each periodogram is scaled by
/// 1 / (fs * sum(w^2)), interior bins are doubled, and blocks are averaged.
std::vector<double> welch_psd(std::span<const double> x, const PsdConfig& config = {});

}  // namespace eegart
