#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "eegart/dataset.hpp"
#include "eegart/pipeline.hpp"
#include "eegart/training.hpp"

namespace eegart {

/// counts[t * C + p]: rows are the true class, columns the predicted class.
struct ConfusionMatrix {
  std::vector<std::string> class_names;
  std::size_t n_classes = 0;
  std::vector<std::size_t> counts;

  std::size_t at(std::size_t truth, std::size_t pred) const { return counts[truth * n_classes + pred]; }
  std::size_t total() const;
  std::size_t correct() const;
  double accuracy() const;
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
};

std::vector<std::string> class_names(Task task);

/// Throws LengthMismatch or BadLabel.
ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truth, int n_classes,
                          std::vector<std::string> names = {});

/// Per-level results. Each accuracy is diagonal / total of the matching matrix:
/// `clean`, `eog` and `emg` hold only segments of that source, `overall` sums
/// all three (clean + EOG-noisy + EMG-noisy).
struct SnrRow {
  int snr_db = 0;
  ConfusionMatrix clean;
  ConfusionMatrix eog;
  ConfusionMatrix emg;
  ConfusionMatrix overall;

  double accuracy_overall() const { return overall.accuracy(); }
  double accuracy_clean() const { return clean.accuracy(); }
  /// Ternary: EOG recall. Binary: EOG detection rate.
  double accuracy_eog() const { return eog.accuracy(); }
  double accuracy_emg() const { return emg.accuracy(); }
  /// Accuracy over the noisy segments only (no clean denominator).
  double accuracy_noisy_only() const;
  std::size_t n() const { return overall.total(); }
};

struct SnrAccuracyTable {
  Task task = Task::Ternary;
  std::vector<SnrRow> rows;

  const SnrRow* find(int snr_db) const;
};

/// Classifies every directory of the bank; clean segments are classified once
/// and shared across levels. Throws LeakageError if the bank shares clean
/// indices with the pipeline's training data, ConfigError on a task mismatch.
SnrAccuracyTable evaluate_bank(const Pipeline& pipeline, const TestBank& bank, Task task);

inline constexpr double kMixedDominantSnrDb = -7.0;
inline constexpr double kMixedSubdominantSnrDb = 2.0;
inline constexpr double kMixedWhiteSnrDb = 3.0;

struct MixedReport {
  ConfusionMatrix eog_dominant;
  ConfusionMatrix emg_dominant;
  double snr_dominant_db = kMixedDominantSnrDb;
  double snr_subdominant_db = kMixedSubdominantSnrDb;
  double snr_white_db = kMixedWhiteSnrDb;
};

/// Composes one EOG-dominant and one EMG-dominant mixture per clean test
/// segment (same EOG/EMG picks in both scenarios, roles swapped) and
/// classifies them with a ternary pipeline.
MixedReport mixed_scenario_report(const Pipeline& pipeline, const SegmentSet& clean,
                                  std::span<const std::size_t> clean_test, const SegmentSet& eog,
                                  const SegmentSet& emg, std::uint64_t seed);

struct BenchResult {
  double wall_time_s = 0.0;
  int epochs_run = 0;
  std::size_t train_rows = 0;
  std::size_t input_dim = 0;
  std::string machine;
};

inline constexpr int kBenchEpochs = 50;

/// Trains for exactly 50 epochs with early stopping disabled; data preparation
/// is outside the timed region.
BenchResult benchmark_training(const Mlp& initial, const LabeledMatrix& train_set,
                               const LabeledMatrix& val_set, TrainConfig config);

std::string machine_descriptor();

struct RunMetadata {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string dataset_hash;
  std::string tool_version;
};

/// CSV: header `snr_db,acc_overall,acc_eog,acc_emg,n`, one row per level.
std::string snr_table_csv(const SnrAccuracyTable& table);

/// snr_table_<task>.csv and confusion_<task>.json.
void emit_report(const SnrAccuracyTable& table, const RunMetadata& meta,
                 const std::filesystem::path& out_dir);
/// confusion_mixed_eog_dominant.json and confusion_mixed_emg_dominant.json.
void emit_report(const MixedReport& report, const RunMetadata& meta,
                 const std::filesystem::path& out_dir);
/// bench.json.
void emit_report(const BenchResult& bench, const RunMetadata& meta,
                 const std::filesystem::path& out_dir);

}  // namespace eegart
