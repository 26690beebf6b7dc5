#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "eegart/matrix.hpp"
#include "eegart/mlp.hpp"

namespace eegart {

struct SchedulerConfig {
  double factor = 0.5;
  int patience = 5;
  double min_lr = 1e-6;
  /// Absolute improvement on validation loss that counts as progress.
  double threshold = 1e-4;
};

struct TrainConfig {
  std::size_t batch_size = 32;
  double lr0 = 1e-3;
  int max_epochs = 100;
  bool early_stopping = true;
  int early_stop_patience = 20;
  double early_stop_threshold = 1e-4;
  SchedulerConfig scheduler;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Reduce-on-plateau in "min" mode with an absolute threshold and no cooldown:
/// after more than `patience` consecutive epochs without an improvement larger
/// than `threshold`, lr becomes max(lr * factor, min_lr).
class PlateauScheduler {
 public:
  PlateauScheduler(double lr0, const SchedulerConfig& config);

  /// Records one epoch's metric and returns the learning rate for the next.
  double step(double metric);
  double lr() const { return lr_; }

 private:
  SchedulerConfig config_;
  double lr_;
  double best_ = std::numeric_limits<double>::infinity();
  int bad_epochs_ = 0;
};

/// Stops once `patience` consecutive epochs fail to beat the best metric by
/// more than `threshold`.
class EarlyStopping {
 public:
  EarlyStopping(int patience, double threshold);

  /// Returns true when training should stop after this epoch.
  bool update(double metric);
  int bad_epochs() const { return bad_epochs_; }

 private:
  int patience_;
  double threshold_;
  double best_ = std::numeric_limits<double>::infinity();
  int bad_epochs_ = 0;
};

struct LabeledMatrix {
  Matrix x;
  std::vector<int> labels;

  std::size_t size() const { return x.rows; }
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  /// Weights from the epoch with the lowest validation loss.
  Mlp best_model;
  std::vector<EpochRecord> history;
  int epochs_run = 0;
  int best_epoch = 0;
  double wall_time_s = 0.0;
};

/// Fraction of rows whose argmax (lowest index on ties) matches the label.
double accuracy(const Mlp& mlp, const LabeledMatrix& data);

/// Minibatch Adam training with per-epoch seeded shuffling (the last partial
/// batch is kept), validation after every epoch, plateau scheduling and early
/// stopping. Throws EmptySplit or DimMismatch.
TrainResult train(const Mlp& initial, const LabeledMatrix& train_set, const LabeledMatrix& val_set,
                  const TrainConfig& config);

}  // namespace eegart
