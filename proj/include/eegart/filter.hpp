#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace eegart {

/// One biquad, H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2).
struct SecondOrderSection {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

struct FilterCascade {
  std::vector<SecondOrderSection> sections;
  double cutoff_hz = 0.0;
  double sample_rate_hz = 0.0;
  int order = 0;
};

/// Digital Butterworth low-pass: analog prototype poles, bilinear transform
/// with the cutoff prewarped, conjugate poles paired into sections by
/// ascending angle, each section scaled to unit DC gain. Odd orders end with
/// a first-order section. Throws InvalidCutoff unless 0 < fc < fs/2.
FilterCascade design_butterworth_lowpass(int order, double cutoff_hz, double sample_rate_hz);

/// Complex response of the cascade at `freq_hz`.
std::complex<double> frequency_response(const FilterCascade& cascade, double freq_hz);

/// Poles of every section (two per section; first-order sections report one).
std::vector<std::complex<double>> cascade_poles(const FilterCascade& cascade);

/// Causal single pass, transposed direct form II, zero initial state.
std::vector<double> filter_signal(const FilterCascade& cascade, std::span<const double> x);

/// Phase-0 downsampling: out[k] = x[k * factor]. Throws NotDivisible.
std::vector<double> decimate(std::span<const double> x, std::size_t factor);

}  // namespace eegart
