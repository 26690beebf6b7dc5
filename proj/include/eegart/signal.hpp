#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eegart/types.hpp"

namespace eegart {

/// Root mean square, sqrt(sum(g^2) / N). Throws EmptySignal on empty input.
double rms(std::span<const double> signal);

/// SNR in dB of a clean trace against an already scaled noise trace:
/// 20 log10(rms(clean) / rms(scaled_noise)).
double snr_db(std::span<const double> clean, std::span<const double> scaled_noise);

/// Scale factor lambda such that 20 log10(rms(x) / rms(lambda * eta)) == snr_db.
double lambda_for_snr(std::span<const double> x, std::span<const double> eta, double snr_db);

/// y = x + lambda * eta; the result carries eta's label.
Segment mix_segments(const Segment& x, const Segment& eta, double lambda);

/// i.i.d. standard Gaussian samples from the WhiteNoise substream of `seed`.
std::vector<double> gen_white_noise(std::size_t n, std::uint64_t seed);

struct NoiseSource {
  std::span<const double> samples;
  NoiseKind kind;
};

/// Dominant + subdominant artifact + white noise, each scaled independently
/// against x. A +infinity SNR drops that term. Label is the dominant kind.
Segment compose_mixed(std::span<const double> x, NoiseSource dominant, NoiseSource subdominant,
                      double snr_dominant_db, double snr_subdominant_db, double snr_white_db,
                      std::uint64_t seed);

/// Zero mean, unit population standard deviation. Throws ConstantSignal.
Segment normalize_segment(const Segment& y);
std::vector<double> normalize_samples(std::span<const double> y);

}  // namespace eegart
