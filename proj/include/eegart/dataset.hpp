#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "eegart/types.hpp"

namespace eegart {

/// Thirteen integer levels in [-7, 6]; -1 dB is the one left out.
inline const std::vector<int> kDefaultSnrLevels = {-7, -6, -5, -4, -3, -2, 0, 1, 2, 3, 4, 5, 6};
inline constexpr std::size_t kTestBankLevelCount = 13;
inline constexpr double kMinSnrDb = -7.0;
inline constexpr double kMaxSnrDb = 6.0;

struct SplitConfig {
  /// Percent of clean segments held out for the test bank (floor).
  std::size_t test_percent = 20;
  /// Percent of the remaining clean segments used for validation (floor).
  std::size_t val_percent = 10;
  double snr_min_db = kMinSnrDb;
  double snr_max_db = kMaxSnrDb;
};

struct NoisyPair {
  std::size_t clean_index = 0;
  std::size_t noise_index = 0;
  NoiseKind kind = NoiseKind::EOG;
  double snr_db = 0.0;
};

struct DatasetSplit {
  std::uint64_t seed = 0;
  std::vector<std::size_t> train_clean;
  std::vector<std::size_t> val_clean;
  std::vector<std::size_t> test_clean;
  /// Each train/val clean index appears once with EOG and once with EMG.
  std::vector<NoisyPair> train_noisy;
  std::vector<NoisyPair> val_noisy;
};

DatasetSplit split_dataset(const SegmentSet& clean, const SegmentSet& eog, const SegmentSet& emg,
                           std::uint64_t seed, const SplitConfig& config = {});

/// Normalized segments with ternary labels, row-major N x 512.
struct LabeledSegments {
  std::size_t rows = 0;
  std::vector<double> data;
  std::vector<SegmentLabel> labels;

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * kSegmentLength, kSegmentLength};
  }
  void append(std::span<const double> samples, SegmentLabel label);
};

/// Builds the training (or validation) corpus: every listed clean segment plus
/// each noisy pair mixed at its SNR, all normalized after mixing.
LabeledSegments assemble_corpus(std::span<const std::size_t> clean_indices,
                                std::span<const NoisyPair> noisy, const SegmentSet& clean,
                                const SegmentSet& eog, const SegmentSet& emg);

struct TestBankLevel {
  int snr_db = 0;
  /// Raw (unnormalized) mixtures, N x 512, row i built from clean row i.
  std::vector<double> eog_noisy;
  std::vector<double> emg_noisy;
  std::vector<double> eog_lambda;
  std::vector<double> emg_lambda;
};

struct TestBank {
  std::uint64_t seed = 0;
  std::vector<std::size_t> clean_indices;
  std::vector<std::size_t> eog_indices;
  std::vector<std::size_t> emg_indices;
  /// Raw clean test segments shared by every level, N x 512.
  std::vector<double> clean;
  std::vector<TestBankLevel> levels;

  std::size_t size() const { return clean_indices.size(); }
  static std::span<const double> row(const std::vector<double>& m, std::size_t i) {
    return {m.data() + i * kSegmentLength, kSegmentLength};
  }
};

/// One EOG and one EMG segment per clean test segment, drawn without
/// replacement and shared across levels; lambda is set per segment so that each
/// mixture hits its level's SNR exactly.
TestBank build_test_bank(const SegmentSet& clean, std::span<const std::size_t> clean_test,
                         const SegmentSet& eog, const SegmentSet& emg,
                         std::span<const int> snr_levels, std::uint64_t seed);

/// Throws LeakageError when any bank clean index is in `training_indices`.
void check_no_leakage(const TestBank& bank, std::span<const std::size_t> training_indices);

/// Layout: <dir>/bank.json plus <dir>/snr_<level>/{clean,eog,emg}.npy and
/// <dir>/snr_<level>/manifest.json.
void save_test_bank(const TestBank& bank, const std::filesystem::path& dir);
TestBank load_test_bank(const std::filesystem::path& dir);

std::filesystem::path level_directory(const std::filesystem::path& bank_dir, int snr_db);

}  // namespace eegart
