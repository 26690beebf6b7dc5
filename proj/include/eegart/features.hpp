#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>

#include "eegart/filter.hpp"
#include "eegart/welch.hpp"

namespace eegart {

inline constexpr std::size_t kLowpassFeatureCount = 32;
inline constexpr std::size_t kPsdFeatureCount = 80;
inline constexpr std::size_t kFeatureCount = kLowpassFeatureCount + kPsdFeatureCount;

/// Layout: [0, 32) low-passed and decimated samples, [32, 112) log10 PSD bins.
using FeatureVector = std::array<double, kFeatureCount>;

struct FeatureConfig {
  int filter_order = 4;
  double cutoff_hz = 10.0;
  std::size_t decimation = 16;
  PsdConfig psd;

  void validate() const;
  /// Persisted with models; prediction refuses a model whose layout differs.
  std::string layout() const;
};

class FeatureExtractor {
 public:
  explicit FeatureExtractor(FeatureConfig config = {});

  /// Expects a 512-sample segment (already normalized, if desired).
  FeatureVector operator()(std::span<const double> segment) const;

  const FeatureConfig& config() const { return config_; }
  const FilterCascade& cascade() const { return cascade_; }

 private:
  FeatureConfig config_;
  FilterCascade cascade_;
};

/// Default-configuration extraction.
FeatureVector extract_features(std::span<const double> segment);

}  // namespace eegart
