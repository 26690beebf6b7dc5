#include "eegart/features.hpp"

#include <cmath>
#include <sstream>

#include "eegart/error.hpp"
#include "eegart/types.hpp"

namespace eegart {

void FeatureConfig::validate() const {
  if (decimation == 0 || kSegmentLength % decimation != 0 ||
      kSegmentLength / decimation != kLowpassFeatureCount) {
    fail(ErrorCode::ConfigError, "decimation must reduce 512 samples to 32");
  }
  if (psd.bins_kept != kPsdFeatureCount) {
    fail(ErrorCode::ConfigError, "feature layout keeps exactly 80 PSD bins");
  }
  psd.validate(kSegmentLength);
}

std::string FeatureConfig::layout() const {
  std::ostringstream s;
  s << "lowpass(butterworth" << filter_order << ",fc=" << cutoff_hz << "Hz,decimate=" << decimation
    << ")x" << kLowpassFeatureCount << "+log10psd(welch,hann,fs=" << psd.sample_rate_hz
    << ",len=" << psd.segment_length << ",overlap=" << psd.overlap << ",eps=" << psd.log_epsilon
    << ")x" << psd.bins_kept;
  return s.str();
}

FeatureExtractor::FeatureExtractor(FeatureConfig config)
    : config_(config),
      cascade_(design_butterworth_lowpass(config.filter_order, config.cutoff_hz,
                                          config.psd.sample_rate_hz)) {
  config_.validate();
}

FeatureVector FeatureExtractor::operator()(std::span<const double> segment) const {
  if (segment.size() != kSegmentLength) {
    fail(ErrorCode::LengthMismatch, "feature extraction needs 512 samples, got " +
                                        std::to_string(segment.size()));
  }
  FeatureVector out{};
  const auto low = decimate(filter_signal(cascade_, segment), config_.decimation);
  for (std::size_t i = 0; i < kLowpassFeatureCount; ++i) out[i] = low[i];
  const auto psd = welch_psd(segment, config_.psd);
  for (std::size_t i = 0; i < kPsdFeatureCount; ++i) {
    out[kLowpassFeatureCount + i] = std::log10(psd[i] + config_.psd.log_epsilon);
  }
  return out;
}

FeatureVector extract_features(std::span<const double> segment) {
  static const FeatureExtractor extractor{};
  return extractor(segment);
}

}  // namespace eegart
