#include "eegart/pipeline.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "eegart/error.hpp"
#include "eegart/signal.hpp"

namespace eegart {

using nlohmann::ordered_json;

int argmax(std::span<const double> probabilities) {
  int best = 0;
  for (std::size_t c = 1; c < probabilities.size(); ++c) {
    if (probabilities[c] > probabilities[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  }
  return best;
}

Prediction Pipeline::predict(std::span<const double> segment,
                             const FeatureExtractor& extractor) const {
  if (segment.size() != kSegmentLength) {
    fail(ErrorCode::LengthMismatch, "predict needs 512 samples, got " + std::to_string(segment.size()));
  }
  std::vector<double> normalized;
  try {
    normalized = normalize_samples(segment);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConstantSignal) throw;
    // a flat segment normalizes to its mean-removed form, all zeros
    normalized.assign(segment.size(), 0.0);
  }
  const FeatureVector features = extractor(normalized);
  const auto scaled = scaler.transform(features);
  const auto scores = pca.project(scaled);
  Prediction p;
  p.probabilities = forward(mlp, scores);
  p.label = argmax(p.probabilities);
  return p;
}

Prediction Pipeline::predict(std::span<const double> segment) const {
  const FeatureExtractor extractor(features);
  return predict(segment, extractor);
}

Matrix feature_matrix(const LabeledSegments& segments, const FeatureExtractor& extractor) {
  Matrix out(segments.rows, kFeatureCount);
  for (std::size_t r = 0; r < segments.rows; ++r) {
    const FeatureVector f = extractor(segments.row(r));
    std::copy(f.begin(), f.end(), out.row(r).begin());
  }
  return out;
}

std::vector<int> task_labels(const LabeledSegments& segments, Task task) {
  std::vector<int> labels;
  labels.reserve(segments.labels.size());
  for (SegmentLabel l : segments.labels) labels.push_back(class_index(l, task));
  return labels;
}

LabeledMatrix project_corpus(const Pipeline& pipeline, const LabeledSegments& corpus) {
  const FeatureExtractor extractor(pipeline.features);
  LabeledMatrix out;
  out.x = pipeline.pca.project(pipeline.scaler.transform(feature_matrix(corpus, extractor)));
  out.labels = task_labels(corpus, pipeline.task);
  return out;
}

FitOutcome fit_pipeline(const LabeledSegments& train_corpus, const LabeledSegments& val_corpus,
                        std::vector<std::size_t> training_clean_indices,
                        const PipelineOptions& options) {
  if (train_corpus.rows == 0 || val_corpus.rows == 0) {
    fail(ErrorCode::EmptySplit, "training and validation corpora must be non-empty");
  }
  FitOutcome outcome;
  Pipeline& p = outcome.pipeline;
  p.task = options.task;
  p.features = options.features;
  p.train_config = options.train;
  p.seed = options.train.seed;
  p.training_clean_indices = std::move(training_clean_indices);
  std::sort(p.training_clean_indices.begin(), p.training_clean_indices.end());

  const FeatureExtractor extractor(p.features);
  const Matrix train_features = feature_matrix(train_corpus, extractor);
  p.scaler = fit_scaler(train_features);
  const Matrix train_scaled = p.scaler.transform(train_features);
  p.pca = fit_pca(train_scaled, options.variance_target);

  LabeledMatrix train_set{p.pca.project(train_scaled), task_labels(train_corpus, p.task)};
  LabeledMatrix val_set{
      p.pca.project(p.scaler.transform(feature_matrix(val_corpus, extractor))),
      task_labels(val_corpus, p.task)};

  const Mlp initial = init_mlp(p.pca.k(), class_count(p.task), options.train.seed, options.dropout_p);
  outcome.training = train(initial, train_set, val_set, options.train);
  p.mlp = outcome.training.best_model;

  const auto& best = outcome.training.history[static_cast<std::size_t>(outcome.training.best_epoch - 1)];
  p.metrics["best_epoch"] = outcome.training.best_epoch;
  p.metrics["epochs_run"] = outcome.training.epochs_run;
  p.metrics["best_val_loss"] = best.val_loss;
  p.metrics["best_val_accuracy"] = best.val_accuracy;
  p.metrics["pca_components"] = static_cast<double>(p.pca.k());
  p.metrics["pca_cumulative_ratio"] = p.pca.cumulative_ratio();
  return outcome;
}

namespace {

ordered_json feature_config_json(const FeatureConfig& f) {
  ordered_json j;
  j["filter_order"] = f.filter_order;
  j["cutoff_hz"] = f.cutoff_hz;
  j["decimation"] = f.decimation;
  j["psd"] = {{"sample_rate_hz", f.psd.sample_rate_hz},
              {"segment_length", f.psd.segment_length},
              {"overlap", f.psd.overlap},
              {"window", "hann"},
              {"bins_kept", f.psd.bins_kept},
              {"log_epsilon", f.psd.log_epsilon}};
  return j;
}

FeatureConfig feature_config_from(const nlohmann::json& j) {
  FeatureConfig f;
  f.filter_order = j.at("filter_order").get<int>();
  f.cutoff_hz = j.at("cutoff_hz").get<double>();
  f.decimation = j.at("decimation").get<std::size_t>();
  const auto& psd = j.at("psd");
  f.psd.sample_rate_hz = psd.at("sample_rate_hz").get<double>();
  f.psd.segment_length = psd.at("segment_length").get<std::size_t>();
  f.psd.overlap = psd.at("overlap").get<std::size_t>();
  f.psd.bins_kept = psd.at("bins_kept").get<std::size_t>();
  f.psd.log_epsilon = psd.at("log_epsilon").get<double>();
  return f;
}

ordered_json train_config_json(const TrainConfig& c) {
  ordered_json j;
  j["batch_size"] = c.batch_size;
  j["lr0"] = c.lr0;
  j["max_epochs"] = c.max_epochs;
  j["early_stopping"] = c.early_stopping;
  j["early_stop_patience"] = c.early_stop_patience;
  j["early_stop_threshold"] = c.early_stop_threshold;
  j["scheduler"] = {{"monitor", "val_loss"},
                    {"factor", c.scheduler.factor},
                    {"patience", c.scheduler.patience},
                    {"min_lr", c.scheduler.min_lr},
                    {"threshold", c.scheduler.threshold}};
  j["loss"] = "cross_entropy";
  j["optimizer"] = {{"name", "adam"}, {"beta1", 0.9}, {"beta2", 0.999}, {"epsilon", 1e-8}};
  j["seed"] = c.seed;
  return j;
}

TrainConfig train_config_from(const nlohmann::json& j) {
  TrainConfig c;
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.lr0 = j.at("lr0").get<double>();
  c.max_epochs = j.at("max_epochs").get<int>();
  c.early_stopping = j.at("early_stopping").get<bool>();
  c.early_stop_patience = j.at("early_stop_patience").get<int>();
  c.early_stop_threshold = j.at("early_stop_threshold").get<double>();
  const auto& s = j.at("scheduler");
  c.scheduler.factor = s.at("factor").get<double>();
  c.scheduler.patience = s.at("patience").get<int>();
  c.scheduler.min_lr = s.at("min_lr").get<double>();
  c.scheduler.threshold = s.at("threshold").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

void save_model(const Pipeline& p, const std::filesystem::path& path) {
  ordered_json j;
  j["format_version"] = kModelFormatVersion;
  j["task"] = std::string(to_string(p.task));
  j["class_names"] = p.task == Task::Binary ? std::vector<std::string>{"Clean", "Noisy"}
                                            : std::vector<std::string>{"Clean", "EOG", "EMG"};
  j["feature_layout"] = p.features.layout();
  j["feature_config"] = feature_config_json(p.features);
  j["scaler"] = {{"mean", p.scaler.mean}, {"std", p.scaler.std},
                 {"clamped_columns", p.scaler.clamped_columns}};
  j["pca"] = {{"k", p.pca.k()},
              {"dim", p.pca.dim()},
              {"variance_target", p.pca.variance_target},
              {"total_variance", p.pca.total_variance},
              {"mean", p.pca.mean},
              {"components", p.pca.components.data},
              {"explained_variance", p.pca.explained_variance},
              {"output_standardized", false}};
  ordered_json mlp;
  mlp["dims"] = {p.mlp.layers[0].in, p.mlp.layers[0].out, p.mlp.layers[1].out, p.mlp.layers[2].out};
  mlp["dropout_p"] = p.mlp.dropout_p;
  mlp["weights"] = ordered_json::array();
  mlp["biases"] = ordered_json::array();
  for (const auto& layer : p.mlp.layers) {
    mlp["weights"].push_back(layer.weights);
    mlp["biases"].push_back(layer.bias);
  }
  j["mlp"] = mlp;
  j["train_config"] = train_config_json(p.train_config);
  j["seed"] = p.seed;
  j["training_clean_indices"] = p.training_clean_indices;
  ordered_json metrics = ordered_json::object();
  for (const auto& [k, v] : p.metrics) metrics[k] = v;
  j["metrics"] = metrics;

  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(1) << '\n';
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

Pipeline load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  Pipeline p;
  std::string layout;
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("format_version").get<int>() != kModelFormatVersion) {
      fail(ErrorCode::ConfigError, path.string() + ": unsupported model format version");
    }
    p.task = parse_task(j.at("task").get<std::string>());
    p.features = feature_config_from(j.at("feature_config"));
    layout = j.at("feature_layout").get<std::string>();

    const auto& sc = j.at("scaler");
    p.scaler.mean = sc.at("mean").get<std::vector<double>>();
    p.scaler.std = sc.at("std").get<std::vector<double>>();
    p.scaler.clamped_columns = sc.at("clamped_columns").get<std::vector<std::size_t>>();

    const auto& pc = j.at("pca");
    const auto k = pc.at("k").get<std::size_t>();
    const auto dim = pc.at("dim").get<std::size_t>();
    p.pca.variance_target = pc.at("variance_target").get<double>();
    p.pca.total_variance = pc.at("total_variance").get<double>();
    p.pca.mean = pc.at("mean").get<std::vector<double>>();
    p.pca.components.rows = k;
    p.pca.components.cols = dim;
    p.pca.components.data = pc.at("components").get<std::vector<double>>();
    p.pca.explained_variance = pc.at("explained_variance").get<std::vector<double>>();
    if (p.pca.components.data.size() != k * dim || p.pca.mean.size() != dim ||
        p.scaler.mean.size() != dim || p.scaler.std.size() != dim) {
      fail(ErrorCode::ShapeMismatch, path.string() + ": scaler/PCA array sizes disagree");
    }

    const auto& m = j.at("mlp");
    const auto dims = m.at("dims").get<std::vector<std::size_t>>();
    if (dims.size() != 4 || dims[0] != k || dims[1] != kHidden1 || dims[2] != kHidden2) {
      fail(ErrorCode::ShapeMismatch, path.string() + ": MLP dims do not match the architecture");
    }
    p.mlp.dropout_p = m.at("dropout_p").get<double>();
    p.mlp.n_classes = static_cast<int>(dims[3]);
    if (p.mlp.n_classes != class_count(p.task)) {
      fail(ErrorCode::ShapeMismatch, path.string() + ": output width does not match the task");
    }
    for (std::size_t l = 0; l < 3; ++l) {
      auto& layer = p.mlp.layers[l];
      layer.in = dims[l];
      layer.out = dims[l + 1];
      layer.weights = m.at("weights").at(l).get<std::vector<double>>();
      layer.bias = m.at("biases").at(l).get<std::vector<double>>();
      if (layer.weights.size() != layer.in * layer.out || layer.bias.size() != layer.out) {
        fail(ErrorCode::ShapeMismatch, path.string() + ": layer " + std::to_string(l) + " size");
      }
    }
    p.train_config = train_config_from(j.at("train_config"));
    p.seed = j.at("seed").get<std::uint64_t>();
    p.training_clean_indices = j.at("training_clean_indices").get<std::vector<std::size_t>>();
    for (const auto& [key, value] : j.at("metrics").items()) p.metrics[key] = value.get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::IoError, path.string() + ": " + e.what());
  }
  if (layout != p.features.layout()) {
    fail(ErrorCode::ConfigError, path.string() + ": feature layout '" + layout +
                                     "' does not match '" + p.features.layout() + "'");
  }
  p.features.validate();
  return p;
}

}  // namespace eegart
