// Acceptance suite: one PASS/FAIL/SKIP line per criterion, with the
// individual checks listed underneath. Exit status is nonzero if any
// criterion fails; a skipped criterion does not fail the run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eegart/dataset.hpp"
#include "eegart/eval.hpp"
#include "eegart/features.hpp"
#include "eegart/filter.hpp"
#include "eegart/mlp.hpp"
#include "eegart/npy.hpp"
#include "eegart/pipeline.hpp"
#include "eegart/preprocess.hpp"
#include "eegart/rng.hpp"
#include "eegart/signal.hpp"
#include "eegart/training.hpp"
#include "eegart/welch.hpp"
#include "support/oracles.hpp"

#ifndef EEGART_DATASET_DIR
#define EEGART_DATASET_DIR ""
#endif

using namespace eegart;
namespace fs = std::filesystem;

namespace {

// Criterion 1 tolerances.
constexpr double kSnrRoundTripDb = 1e-9;
constexpr double kDcGainDb = 1e-6;
constexpr double kCutoffGainDb = -3.01;
constexpr double kCutoffGainTolDb = 0.05;
constexpr double kWelchRel = 1e-10;
constexpr double kOrthonormality = 1e-9;
constexpr double kReconstructionRel = 1e-8;
constexpr double kGradientRel = 1e-5;
constexpr double kSoftmaxSum = 1e-12;

// Criterion 2.
constexpr double kBlobAccuracy = 0.99;
constexpr int kConstantLossStopEpoch = 21;

// Criterion 3.
struct TernaryFloor {
  int snr_db;
  double min_accuracy;
};
constexpr TernaryFloor kTernaryFloors[] = {{-7, 0.97}, {0, 0.96}, {2, 0.94}, {4, 0.90}, {6, 0.85}};
constexpr double kEndToEndSeconds = 15 * 60;
constexpr double kBinaryLowSnrDetection = 0.97;
constexpr int kBinaryLowSnrCeilingDb = -2;
constexpr double kMixedEmgDominant = 0.95;
constexpr double kMixedEogDominant = 0.92;
constexpr std::size_t kMixedEogAsCleanMax = 5;
constexpr std::size_t kPcaComponents = 73;
constexpr std::size_t kPcaComponentsTol = 10;
constexpr double kBenchSeconds = 300.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

class Criterion {
 public:
  Criterion(int number, std::string title) : number_(number), title_(std::move(title)) {}

  void check(const std::string& what, bool ok, const std::string& detail) {
    lines_.push_back(std::string(ok ? "    ok    " : "    FAIL  ") + what + ": " + detail);
    failed_ = failed_ || !ok;
  }

  /// Runs `body`, turning an escaped exception into a failed check.
  void run(const std::function<void(Criterion&)>& body) {
    const auto start = Clock::now();
    try {
      body(*this);
    } catch (const std::exception& e) {
      check("unexpected exception", false, e.what());
    }
    elapsed_ = seconds_since(start);
  }

  /// Reported alongside the checks but never fails the criterion.
  void info(const std::string& what, const std::string& detail) {
    lines_.push_back("    info  " + what + ": " + detail);
  }

  void skip(std::string reason) { skip_reason_ = std::move(reason); }

  bool failed() const { return failed_ && skip_reason_.empty(); }

  void print(std::ostream& os) const {
    if (!skip_reason_.empty()) {
      os << "SKIP criterion " << number_ << " (" << title_ << "): " << skip_reason_ << '\n';
      return;
    }
    os << (failed_ ? "FAIL" : "PASS") << " criterion " << number_ << " (" << title_ << ") "
       << fmt("[%.1f s]", elapsed_) << '\n';
    for (const auto& l : lines_) os << l << '\n';
  }

 private:
  int number_;
  std::string title_;
  std::vector<std::string> lines_;
  bool failed_ = false;
  std::string skip_reason_;
  double elapsed_ = 0.0;
};

std::vector<double> gaussian_vector(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.gaussian();
  return v;
}

// ---------------------------------------------------------------- criterion 1

void snr_round_trip(Criterion& c) {
  Rng rng(101, Stream::Split);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = gaussian_vector(rng, kSegmentLength, std::exp(rng.uniform(-3.0, 3.0)));
    const auto eta = gaussian_vector(rng, kSegmentLength, std::exp(rng.uniform(-3.0, 3.0)));
    const double target = rng.uniform(-20.0, 20.0);
    const double lambda = lambda_for_snr(x, eta, target);
    std::vector<double> scaled(eta);
    for (double& v : scaled) v *= lambda;
    worst = std::max(worst, std::abs(snr_db(x, scaled) - target));
  }
  c.check("lambda inversion on 1000 random pairs", worst <= kSnrRoundTripDb,
          fmt("max |SNR - target| = %.3g dB", worst));
}

void butterworth(Criterion& c) {
  const FilterCascade f = design_butterworth_lowpass(4, 10.0, 256.0);
  const double dc = 20.0 * std::log10(std::abs(frequency_response(f, 0.0)));
  c.check("Butterworth DC gain", std::abs(dc) <= kDcGainDb, fmt("%.3g dB", dc));
  const double at_fc = 20.0 * std::log10(std::abs(frequency_response(f, 10.0)));
  c.check("Butterworth gain at 10 Hz", std::abs(at_fc - kCutoffGainDb) <= kCutoffGainTolDb,
          fmt("%.4f dB", at_fc));
  double max_pole = 0.0;
  for (const auto& p : cascade_poles(f)) max_pole = std::max(max_pole, std::abs(p));
  c.check("Butterworth poles inside unit circle", max_pole < 1.0, fmt("max |p| = %.6f", max_pole));
}

void welch(Criterion& c) {
  Rng rng(102, Stream::Split);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto x = gaussian_vector(rng, kSegmentLength);
    const auto got = welch_psd(x);
    const auto ref = testing::welch_oracle(x, 256, 128, 80, 256.0);
    for (std::size_t b = 0; b < ref.size(); ++b) worst = std::max(worst, std::abs(got[b] - ref[b]) / ref[b]);
  }
  c.check("Welch vs block-DFT oracle on 100 signals", worst <= kWelchRel, fmt("max rel. error %.3g", worst));

  std::vector<double> tone(kSegmentLength);
  for (std::size_t n = 0; n < tone.size(); ++n) {
    tone[n] = std::sin(2.0 * std::acos(-1.0) * 10.0 * static_cast<double>(n) / 256.0);
  }
  const auto psd = welch_psd(tone);
  const auto peak = std::max_element(psd.begin(), psd.end()) - psd.begin();
  c.check("10 Hz sinusoid peak bin", peak == 10, fmt("bin %.0f", static_cast<double>(peak)));
}

void pca(Criterion& c) {
  Rng rng(103, Stream::Split);
  const std::size_t d = 12, n = 500;
  Matrix mix(d, d);
  for (double& v : mix.data) v = rng.gaussian() * std::exp(rng.uniform(-2.0, 1.0));
  Matrix x(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    const auto g = gaussian_vector(rng, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) x(r, i) += mix(i, j) * g[j];
  }
  const PcaModel p = fit_pca(x, 0.95);

  double ortho = 0.0;
  for (std::size_t a = 0; a < p.k(); ++a) {
    for (std::size_t b = 0; b < p.k(); ++b) {
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += p.components(a, j) * p.components(b, j);
      ortho = std::max(ortho, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  }
  c.check("PCA component orthonormality", ortho <= kOrthonormality, fmt("max |C C^T - I| = %.3g", ortho));

  const Matrix scores = p.project(x);
  double mse = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto rec = p.reconstruct(scores.row(r));
    for (std::size_t j = 0; j < d; ++j) mse += (rec[j] - x(r, j)) * (rec[j] - x(r, j));
  }
  mse /= static_cast<double>(n);
  const double kept = std::accumulate(p.explained_variance.begin(), p.explained_variance.end(), 0.0);
  const double discarded = p.total_variance - kept;
  const double rel = std::abs(mse - discarded) / discarded;
  c.check("PCA reconstruction MSE = discarded variance", rel <= kReconstructionRel,
          fmt("k=%.0f, MSE %.10g vs %.10g", static_cast<double>(p.k()), mse, discarded) +
              fmt(" (rel %.3g)", rel));

  Matrix rank2(200, 6);
  const double u[6] = {1, 2, 0, -1, 0.5, 3};
  const double v[6] = {0, 1, 1, 1, -2, 0};
  for (std::size_t r = 0; r < 200; ++r) {
    const double a = rng.gaussian(), b = rng.gaussian();
    for (std::size_t j = 0; j < 6; ++j) rank2(r, j) = a * u[j] + b * v[j];
  }
  const std::size_t k2 = fit_pca(rank2, 0.95).k();
  c.check("PCA on rank-2 data", k2 == 2, fmt("k = %.0f", static_cast<double>(k2)));
}

void gradients(Criterion& c) {
  struct Case {
    std::size_t in;
    int classes;
    bool train;
  };
  double worst = 0.0;
  std::size_t checked = 0;
  std::uint64_t seed = 104;
  for (const Case& k : {Case{4, 3, false}, Case{3, 2, false}, Case{5, 3, true}}) {
    Mlp m = init_mlp(k.in, k.classes, seed);
    Rng rng(seed++, Stream::Split);
    for (auto& layer : m.layers)
      for (double& b : layer.bias) b = 0.1 * rng.gaussian();
    Matrix x(5, k.in);
    for (double& v : x.data) v = rng.gaussian();
    std::vector<int> y(5);
    for (int& v : y) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(k.classes)));
    const ForwardMode mode = k.train ? ForwardMode::training(seed, 1) : ForwardMode::eval();
    const LossAndGrad lg = loss_and_grad(m, x, y, mode);
    auto params = m.parameters();
    for (std::size_t t = 0; t < params.size(); ++t) {
      for (std::size_t i = 0; i < params[t].size(); ++i) {
        const double saved = params[t][i];
        const double h = 1e-5;
        params[t][i] = saved + h;
        const double up = loss_and_grad(m, x, y, mode).loss;
        params[t][i] = saved - h;
        const double down = loss_and_grad(m, x, y, mode).loss;
        params[t][i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double analytic = lg.grads.tensors[t][i];
        const double denom = std::max(1e-4, std::abs(numeric) + std::abs(analytic));
        worst = std::max(worst, std::abs(numeric - analytic) / denom);
        ++checked;
      }
    }
  }
  c.check("MLP gradients vs central differences", worst < kGradientRel,
          fmt("%.0f parameters, max rel. error %.3g", static_cast<double>(checked), worst));
}

void softmax_and_uniform(Criterion& c) {
  Rng rng(105, Stream::Split);
  const Mlp m = init_mlp(7, 3, 105);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto x = gaussian_vector(rng, 7, 10.0);
    const auto p = forward(m, x);
    worst = std::max(worst, std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0));
  }
  c.check("softmax rows sum to 1", worst <= kSoftmaxSum, fmt("max |sum - 1| = %.3g", worst));

  for (int classes : {2, 3}) {
    Mlp u = init_mlp(5, classes, 106);
    std::fill(u.layers[2].weights.begin(), u.layers[2].weights.end(), 0.0);
    Matrix x(16, 5);
    for (double& v : x.data) v = rng.gaussian();
    std::vector<int> y(16);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i % static_cast<std::size_t>(classes));
    const double loss = mean_loss(u, x, y);
    const double expected = std::log(static_cast<double>(classes));
    c.check("uniform-network loss, C=" + std::to_string(classes), std::abs(loss - expected) <= 1e-12,
            fmt("%.15f vs ln C = %.15f", loss, expected));
  }
}

LabeledMatrix gaussian_blobs(std::size_t per_class, const std::vector<std::vector<double>>& centers,
                             double spread, std::uint64_t seed) {
  Rng rng(seed, Stream::Split);
  const std::size_t d = centers.front().size();
  LabeledMatrix out;
  out.x = Matrix(0, d);
  std::vector<double> row(d);
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t cls = 0; cls < centers.size(); ++cls) {
      for (std::size_t j = 0; j < d; ++j) row[j] = centers[cls][j] + spread * rng.gaussian();
      out.x.append_row(row);
      out.labels.push_back(static_cast<int>(cls));
    }
  }
  return out;
}

void determinism(Criterion& c) {
  const std::vector<std::vector<double>> centers = {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}};
  const LabeledMatrix tr = gaussian_blobs(40, centers, 1.0, 107);
  const LabeledMatrix va = gaussian_blobs(10, centers, 1.0, 108);
  TrainConfig cfg;
  cfg.max_epochs = 8;
  cfg.seed = 109;
  const TrainResult a = train(init_mlp(3, 3, cfg.seed), tr, va, cfg);
  const TrainResult b = train(init_mlp(3, 3, cfg.seed), tr, va, cfg);
  bool identical = true;
  for (std::size_t l = 0; l < 3; ++l) {
    identical = identical && a.best_model.layers[l].weights == b.best_model.layers[l].weights &&
                a.best_model.layers[l].bias == b.best_model.layers[l].bias;
  }
  c.check("seeded init + train twice", identical, identical ? "bit-identical weights" : "weights differ");
}

void criterion_one(Criterion& c) {
  snr_round_trip(c);
  butterworth(c);
  welch(c);
  pca(c);
  gradients(c);
  softmax_and_uniform(c);
  determinism(c);
}

// ---------------------------------------------------------------- criterion 2

void criterion_two(Criterion& c) {
  const std::vector<std::vector<double>> centers = {{-3.0, 0.0}, {3.0, 0.0}};
  const LabeledMatrix tr = gaussian_blobs(200, centers, 1.0, 201);
  const LabeledMatrix va = gaussian_blobs(100, centers, 1.0, 202);
  TrainConfig cfg;
  cfg.seed = 203;
  cfg.max_epochs = 60;
  const TrainResult r = train(init_mlp(2, 2, cfg.seed), tr, va, cfg);
  const double acc = accuracy(r.best_model, va);
  c.check("two-blob binary validation accuracy", acc >= kBlobAccuracy,
          fmt("%.4f after %.0f epochs", acc, r.epochs_run));

  LabeledMatrix flat_train{Matrix(16, 3, 0.0), {}};
  LabeledMatrix flat_val{Matrix(8, 3, 0.0), {}};
  for (std::size_t i = 0; i < 16; ++i) flat_train.labels.push_back(static_cast<int>(i % 2));
  for (std::size_t i = 0; i < 8; ++i) flat_val.labels.push_back(static_cast<int>(i % 2));
  TrainConfig flat;
  flat.seed = 204;
  flat.batch_size = 16;
  const TrainResult s = train(init_mlp(3, 2, flat.seed), flat_train, flat_val, flat);
  c.check("early stopping on constant validation loss", s.epochs_run == kConstantLossStopEpoch,
          fmt("stopped after epoch %.0f", s.epochs_run));
}

// ---------------------------------------------------------------- criterion 3

const char* const kDatasetFiles[] = {"EEG_all_epochs.npy", "EOG_all_epochs.npy", "EMG_all_epochs.npy"};

std::string missing_dataset(const fs::path& dir) {
  if (dir.empty()) return "no dataset directory given (--data-dir or EEGART_DATASET_DIR)";
  for (const char* f : kDatasetFiles) {
    if (!fs::exists(dir / f)) return (dir / f).string() + " not found";
  }
  return {};
}

void criterion_three(Criterion& c, const fs::path& dir, std::uint64_t seed) {
  const auto start = Clock::now();
  const SegmentSet clean = read_npy(dir / kDatasetFiles[0], SetKind::CleanEEG);
  const SegmentSet eog = read_npy(dir / kDatasetFiles[1], SetKind::EOG);
  const SegmentSet emg = read_npy(dir / kDatasetFiles[2], SetKind::EMG);
  c.check("dataset loaded", true,
          std::to_string(clean.size()) + " clean, " + std::to_string(eog.size()) + " EOG, " +
              std::to_string(emg.size()) + " EMG segments");

  const DatasetSplit split = split_dataset(clean, eog, emg, seed);
  const TestBank bank = build_test_bank(clean, split.test_clean, eog, emg, kDefaultSnrLevels, seed);
  const auto train_corpus = assemble_corpus(split.train_clean, split.train_noisy, clean, eog, emg);
  const auto val_corpus = assemble_corpus(split.val_clean, split.val_noisy, clean, eog, emg);
  std::vector<std::size_t> used = split.train_clean;
  used.insert(used.end(), split.val_clean.begin(), split.val_clean.end());
  std::sort(used.begin(), used.end());

  PipelineOptions options;
  options.train.seed = seed;
  options.task = Task::Ternary;
  const FitOutcome ternary = fit_pipeline(train_corpus, val_corpus, used, options);
  const SnrAccuracyTable table = evaluate_bank(ternary.pipeline, bank, Task::Ternary);
  const double end_to_end = seconds_since(start);

  for (const auto& floor : kTernaryFloors) {
    const SnrRow* row = table.find(floor.snr_db);
    const double acc = row ? row->accuracy_overall() : 0.0;
    c.check("ternary accuracy at " + std::to_string(floor.snr_db) + " dB", acc >= floor.min_accuracy,
            fmt("%.4f (floor %.2f)", acc, floor.min_accuracy));
  }
  const double low = table.find(-7)->accuracy_overall();
  const double high = table.find(6)->accuracy_overall();
  c.check("ternary accuracy at -7 dB >= at 6 dB", low >= high, fmt("%.4f vs %.4f", low, high));
  c.check("prepare + train + eval runtime", end_to_end <= kEndToEndSeconds, fmt("%.1f s", end_to_end));

  const std::size_t k = ternary.pipeline.pca.k();
  const std::size_t k_off = k > kPcaComponents ? k - kPcaComponents : kPcaComponents - k;
  c.check("PCA components at 0.95 variance", k_off <= kPcaComponentsTol,
          fmt("k = %.0f (cumulative ratio %.4f)", static_cast<double>(k), ternary.pipeline.pca.cumulative_ratio()));

  options.task = Task::Binary;
  const FitOutcome binary = fit_pipeline(train_corpus, val_corpus, used, options);
  const SnrAccuracyTable btable = evaluate_bank(binary.pipeline, bank, Task::Binary);
  double worst_eog = 1.0, worst_emg = 1.0;
  for (const SnrRow& row : btable.rows) {
    if (row.snr_db > kBinaryLowSnrCeilingDb) continue;
    worst_eog = std::min(worst_eog, row.accuracy_eog());
    worst_emg = std::min(worst_emg, row.accuracy_emg());
  }
  c.check("binary EOG detection at SNR <= -2 dB", worst_eog >= kBinaryLowSnrDetection, fmt("min %.4f", worst_eog));
  c.check("binary EMG detection at SNR <= -2 dB", worst_emg >= kBinaryLowSnrDetection, fmt("min %.4f", worst_emg));
  const SnrRow* six = btable.find(6);
  c.check("binary detection at 6 dB, EMG >= EOG", six->accuracy_emg() >= six->accuracy_eog(),
          fmt("EMG %.4f, EOG %.4f", six->accuracy_emg(), six->accuracy_eog()));

  const ConfusionMatrix emg6 = [&] {
    ConfusionMatrix m = six->clean;
    m += six->emg;
    return m;
  }();
  c.info("binary EMG detection at 6 dB (paper: TP 805, FN 97, FP 2)",
         fmt("TP %.0f, FN %.0f, FP %.0f", static_cast<double>(emg6.at(1, 1)), static_cast<double>(emg6.at(1, 0)),
             static_cast<double>(emg6.at(0, 1))));
  c.info("ternary early stopping (paper: around 40 of 100 epochs)",
         fmt("%.0f epochs run, best %.0f", ternary.training.epochs_run, ternary.training.best_epoch));
  {
    const TestBankLevel* level = nullptr;
    for (const auto& l : bank.levels) {
      if (l.snr_db == -7) level = &l;
    }
    const FeatureExtractor extractor(ternary.pipeline.features);
    std::size_t confident = 0;
    for (std::size_t i = 0; i < bank.size(); ++i) {
      const Prediction p = ternary.pipeline.predict(TestBank::row(level->emg_noisy, i), extractor);
      confident += p.label == 2 && p.probabilities[2] >= 0.9;
    }
    c.info("-7 dB EMG segments labelled EMG with p >= 0.9",
           fmt("%.4f", static_cast<double>(confident) / static_cast<double>(bank.size())));
  }

  const MixedReport mixed = mixed_scenario_report(ternary.pipeline, clean, split.test_clean, eog, emg, seed);
  c.check("mixed EMG-dominant accuracy", mixed.emg_dominant.accuracy() >= kMixedEmgDominant,
          fmt("%.4f (%.0f/%.0f)", mixed.emg_dominant.accuracy(), static_cast<double>(mixed.emg_dominant.correct()),
              static_cast<double>(mixed.emg_dominant.total())));
  c.check("mixed EOG-dominant accuracy", mixed.eog_dominant.accuracy() >= kMixedEogDominant,
          fmt("%.4f (%.0f/%.0f)", mixed.eog_dominant.accuracy(), static_cast<double>(mixed.eog_dominant.correct()),
              static_cast<double>(mixed.eog_dominant.total())));
  const std::size_t as_clean = mixed.eog_dominant.at(1, 0);
  c.check("mixed EOG-dominant classified as Clean", as_clean <= kMixedEogAsCleanMax,
          fmt("%.0f segments", static_cast<double>(as_clean)));

  const LabeledMatrix tr = project_corpus(ternary.pipeline, train_corpus);
  const LabeledMatrix va = project_corpus(ternary.pipeline, val_corpus);
  const BenchResult bench =
      benchmark_training(init_mlp(k, 3, seed), tr, va, ternary.pipeline.train_config);
  c.check("50 training epochs", bench.epochs_run == kBenchEpochs && bench.wall_time_s <= kBenchSeconds,
          fmt("%.1f s for %.0f epochs", bench.wall_time_s, bench.epochs_run) + " on " + bench.machine);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eegart acceptance suite"};
  std::string data_dir = EEGART_DATASET_DIR;
  std::uint64_t seed = 7;
  app.add_option("--data-dir", data_dir, "Directory with the EEG/EOG/EMG *_all_epochs.npy files");
  app.add_option("--seed", seed, "Seed for the dataset-dependent criterion");
  CLI11_PARSE(app, argc, argv);

  Criterion one(1, "property suite");
  one.run(criterion_one);
  one.print(std::cout);
  std::cout.flush();

  Criterion two(2, "toy-learning sanity");
  two.run(criterion_two);
  two.print(std::cout);
  std::cout.flush();

  Criterion three(3, "published-dataset reproduction");
  const std::string missing = missing_dataset(data_dir);
  if (missing.empty()) {
    three.run([&](Criterion& c) { criterion_three(c, data_dir, seed); });
  } else {
    three.skip(missing);
  }
  three.print(std::cout);

  return (one.failed() || two.failed() || three.failed()) ? 1 : 0;
}
