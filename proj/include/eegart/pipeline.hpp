#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "eegart/dataset.hpp"
#include "eegart/features.hpp"
#include "eegart/mlp.hpp"
#include "eegart/preprocess.hpp"
#include "eegart/training.hpp"
#include "eegart/types.hpp"

namespace eegart {

inline constexpr int kModelFormatVersion = 1;

struct Prediction {
  int label = 0;
  std::vector<double> probabilities;
};

/// Everything needed to classify a raw segment: normalize, extract features,
/// standardize, project, then run the MLP in Eval mode. PCA scores feed the
/// network directly, without re-standardization.
struct Pipeline {
  Task task = Task::Ternary;
  FeatureConfig features;
  Scaler scaler;
  PcaModel pca;
  Mlp mlp;
  TrainConfig train_config;
  std::uint64_t seed = 0;
  /// Clean-segment indices that fed training or validation; evaluation
  /// refuses any test bank that overlaps them.
  std::vector<std::size_t> training_clean_indices;
  std::map<std::string, double> metrics;

  /// A zero-variance segment is classified as all zeros after normalization.
  Prediction predict(std::span<const double> segment) const;
  /// Same as predict but with an extractor built once by the caller.
  Prediction predict(std::span<const double> segment, const FeatureExtractor& extractor) const;
};

/// Argmax with ties going to the lowest class index.
int argmax(std::span<const double> probabilities);

struct PipelineOptions {
  Task task = Task::Ternary;
  FeatureConfig features;
  double variance_target = 0.95;
  double dropout_p = kDefaultDropout;
  TrainConfig train;
};

struct FitOutcome {
  Pipeline pipeline;
  TrainResult training;
};

/// N x 112 features of every row.
Matrix feature_matrix(const LabeledSegments& segments, const FeatureExtractor& extractor);

/// Class indices of the corpus labels under `task`.
std::vector<int> task_labels(const LabeledSegments& segments, Task task);

/// Fits scaler and PCA on the training corpus only, then trains the MLP.
/// Seeds for initialization, shuffling and dropout all derive from
/// options.train.seed.
FitOutcome fit_pipeline(const LabeledSegments& train_corpus, const LabeledSegments& val_corpus,
                        std::vector<std::size_t> training_clean_indices,
                        const PipelineOptions& options);

/// Projected (scaled + PCA) inputs ready for the network.
LabeledMatrix project_corpus(const Pipeline& pipeline, const LabeledSegments& corpus);

/// Single versioned JSON document; reloading reproduces predictions bit for bit.
void save_model(const Pipeline& pipeline, const std::filesystem::path& path);
/// Throws ConfigError when the stored feature layout differs from the one the
/// stored feature configuration produces, IoError on malformed files.
Pipeline load_model(const std::filesystem::path& path);

}  // namespace eegart
