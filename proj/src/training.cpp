#include "eegart/training.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>

#include "eegart/error.hpp"
#include "eegart/rng.hpp"

namespace eegart {

void TrainConfig::validate() const {
  if (batch_size < 1) fail(ErrorCode::ConfigError, "batch_size must be >= 1");
  if (!(lr0 > 0.0)) fail(ErrorCode::ConfigError, "lr0 must be positive");
  if (max_epochs < 1) fail(ErrorCode::ConfigError, "max_epochs must be >= 1");
  if (early_stop_patience < 1 || scheduler.patience < 1) {
    fail(ErrorCode::ConfigError, "patience values must be >= 1");
  }
  if (!(scheduler.factor > 0.0 && scheduler.factor < 1.0)) {
    fail(ErrorCode::ConfigError, "scheduler factor must be in (0, 1)");
  }
  if (scheduler.min_lr < 0.0 || scheduler.threshold < 0.0 || early_stop_threshold < 0.0) {
    fail(ErrorCode::ConfigError, "scheduler/early-stop thresholds must be non-negative");
  }
}

PlateauScheduler::PlateauScheduler(double lr0, const SchedulerConfig& config)
    : config_(config), lr_(lr0) {}

double PlateauScheduler::step(double metric) {
  if (metric < best_ - config_.threshold) {
    best_ = metric;
    bad_epochs_ = 0;
  } else {
    ++bad_epochs_;
  }
  if (bad_epochs_ > config_.patience) {
    lr_ = std::max(lr_ * config_.factor, config_.min_lr);
    bad_epochs_ = 0;
  }
  return lr_;
}

EarlyStopping::EarlyStopping(int patience, double threshold)
    : patience_(patience), threshold_(threshold) {}

bool EarlyStopping::update(double metric) {
  if (metric < best_ - threshold_) {
    best_ = metric;
    bad_epochs_ = 0;
  } else {
    ++bad_epochs_;
  }
  return bad_epochs_ >= patience_;
}

double accuracy(const Mlp& mlp, const LabeledMatrix& data) {
  if (data.size() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto probs = forward(mlp, data.x.row(r));
    const auto pred = std::max_element(probs.begin(), probs.end()) - probs.begin();
    if (pred == data.labels[r]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

TrainResult train(const Mlp& initial, const LabeledMatrix& train_set, const LabeledMatrix& val_set,
                  const TrainConfig& config) {
  config.validate();
  if (train_set.size() == 0 || val_set.size() == 0) {
    fail(ErrorCode::EmptySplit, "training and validation sets must be non-empty");
  }
  if (train_set.x.cols != initial.input_dim() || val_set.x.cols != initial.input_dim()) {
    fail(ErrorCode::DimMismatch, "feature width differs from the MLP input dimension " +
                                     std::to_string(initial.input_dim()));
  }
  if (train_set.labels.size() != train_set.size() || val_set.labels.size() != val_set.size()) {
    fail(ErrorCode::LengthMismatch, "one label per row required");
  }

  const auto started = std::chrono::steady_clock::now();
  TrainResult result;
  Mlp model = initial;
  result.best_model = model;
  double best_val = std::numeric_limits<double>::infinity();

  AdamState adam;
  PlateauScheduler scheduler(config.lr0, config.scheduler);
  EarlyStopping stopper(config.early_stop_patience, config.early_stop_threshold);
  Rng shuffle_rng(config.seed, Stream::Shuffle);
  double lr = config.lr0;
  std::uint64_t global_step = 0;

  const std::size_t n = train_set.size();
  std::vector<std::size_t> order(n);
  Matrix batch;
  std::vector<int> batch_labels;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t end = std::min(n, start + config.batch_size);
      batch = Matrix(0, 0);
      batch.cols = train_set.x.cols;
      batch.data.reserve((end - start) * batch.cols);
      batch_labels.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch.append_row(train_set.x.row(order[i]));
        batch_labels.push_back(train_set.labels[order[i]]);
      }
      const auto lg = loss_and_grad(model, batch, batch_labels,
                                    ForwardMode::training(config.seed, global_step));
      loss_sum += lg.loss * static_cast<double>(end - start);

      const auto params = model.parameters();
      std::vector<std::span<const double>> grads(lg.grads.tensors.begin(), lg.grads.tensors.end());
      adam_update(adam, params, grads, lr);
      ++global_step;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.train_loss = loss_sum / static_cast<double>(n);
    rec.val_loss = mean_loss(model, val_set.x, val_set.labels);
    rec.val_accuracy = accuracy(model, val_set);
    result.history.push_back(rec);
    result.epochs_run = epoch;

    if (rec.val_loss < best_val) {
      best_val = rec.val_loss;
      result.best_model = model;
      result.best_epoch = epoch;
    }
    lr = scheduler.step(rec.val_loss);
    if (config.early_stopping && stopper.update(rec.val_loss)) break;
  }

  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace eegart
