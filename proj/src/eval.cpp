#include "eegart/eval.hpp"

#include <sys/utsname.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "eegart/error.hpp"
#include "eegart/rng.hpp"
#include "eegart/signal.hpp"

namespace eegart {

using nlohmann::ordered_json;

std::size_t ConfusionMatrix::total() const {
  std::size_t s = 0;
  for (std::size_t c : counts) s += c;
  return s;
}

std::size_t ConfusionMatrix::correct() const {
  std::size_t s = 0;
  for (std::size_t i = 0; i < n_classes; ++i) s += at(i, i);
  return s;
}

double ConfusionMatrix::accuracy() const {
  const std::size_t t = total();
  return t == 0 ? 0.0 : static_cast<double>(correct()) / static_cast<double>(t);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (n_classes == 0) {
    *this = other;
    return *this;
  }
  if (other.n_classes != n_classes) fail(ErrorCode::ShapeMismatch, "confusion matrix sizes differ");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

std::vector<std::string> class_names(Task task) {
  if (task == Task::Binary) return {"Clean", "Noisy"};
  return {"Clean", "EOG", "EMG"};
}

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truth, int n_classes,
                          std::vector<std::string> names) {
  if (preds.size() != truth.size()) {
    fail(ErrorCode::LengthMismatch, "confusion: " + std::to_string(preds.size()) +
                                        " predictions vs " + std::to_string(truth.size()) + " labels");
  }
  if (n_classes < 1) fail(ErrorCode::ConfigError, "confusion needs at least one class");
  ConfusionMatrix m;
  m.n_classes = static_cast<std::size_t>(n_classes);
  m.counts.assign(m.n_classes * m.n_classes, 0);
  m.class_names = std::move(names);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] < 0 || preds[i] >= n_classes || truth[i] < 0 || truth[i] >= n_classes) {
      fail(ErrorCode::BadLabel, "label outside [0, " + std::to_string(n_classes) + ")");
    }
    ++m.counts[static_cast<std::size_t>(truth[i]) * m.n_classes + static_cast<std::size_t>(preds[i])];
  }
  return m;
}

double SnrRow::accuracy_noisy_only() const {
  ConfusionMatrix noisy = eog;
  noisy += emg;
  return noisy.accuracy();
}

const SnrRow* SnrAccuracyTable::find(int snr_db) const {
  for (const auto& row : rows) {
    if (row.snr_db == snr_db) return &row;
  }
  return nullptr;
}

namespace {

std::vector<int> classify_rows(const Pipeline& pipeline, const FeatureExtractor& extractor,
                               const std::vector<double>& matrix, std::size_t n) {
  std::vector<int> preds(n);
  for (std::size_t i = 0; i < n; ++i) {
    preds[i] = pipeline.predict(TestBank::row(matrix, i), extractor).label;
  }
  return preds;
}

}  // namespace

SnrAccuracyTable evaluate_bank(const Pipeline& pipeline, const TestBank& bank, Task task) {
  if (task != pipeline.task) {
    fail(ErrorCode::ConfigError, "pipeline was trained for the " + std::string(to_string(pipeline.task)) +
                                     " task, not " + std::string(to_string(task)));
  }
  check_no_leakage(bank, pipeline.training_clean_indices);

  const int n_classes = class_count(task);
  const auto names = class_names(task);
  const std::size_t n = bank.size();
  const FeatureExtractor extractor(pipeline.features);

  const auto truth_for = [&](SegmentLabel label) {
    return std::vector<int>(n, class_index(label, task));
  };
  const auto clean_truth = truth_for(SegmentLabel::Clean);
  const auto eog_truth = truth_for(SegmentLabel::EOG);
  const auto emg_truth = truth_for(SegmentLabel::EMG);

  const auto clean_preds = classify_rows(pipeline, extractor, bank.clean, n);
  const ConfusionMatrix clean_cm = confusion(clean_preds, clean_truth, n_classes, names);

  SnrAccuracyTable table;
  table.task = task;
  for (const auto& level : bank.levels) {
    SnrRow row;
    row.snr_db = level.snr_db;
    row.clean = clean_cm;
    row.eog = confusion(classify_rows(pipeline, extractor, level.eog_noisy, n), eog_truth,
                        n_classes, names);
    row.emg = confusion(classify_rows(pipeline, extractor, level.emg_noisy, n), emg_truth,
                        n_classes, names);
    row.overall = row.clean;
    row.overall += row.eog;
    row.overall += row.emg;
    table.rows.push_back(std::move(row));
  }
  return table;
}

MixedReport mixed_scenario_report(const Pipeline& pipeline, const SegmentSet& clean,
                                  std::span<const std::size_t> clean_test, const SegmentSet& eog,
                                  const SegmentSet& emg, std::uint64_t seed) {
  if (pipeline.task != Task::Ternary) {
    fail(ErrorCode::ConfigError, "the mixed scenario needs a ternary pipeline");
  }
  if (eog.size() == 0 || emg.size() == 0) {
    fail(ErrorCode::InsufficientNoiseSegments, "mixed scenario needs EOG and EMG segments");
  }
  const FeatureExtractor extractor(pipeline.features);
  Rng rng(seed, Stream::Mixed);

  MixedReport report;
  std::vector<int> eog_dom_preds, emg_dom_preds;
  for (std::size_t c : clean_test) {
    if (c >= clean.size()) fail(ErrorCode::InsufficientData, "clean test index out of range");
    const auto x = clean.row(c);
    const NoiseSource eog_src{eog.row(rng.below(eog.size())), NoiseKind::EOG};
    const NoiseSource emg_src{emg.row(rng.below(emg.size())), NoiseKind::EMG};
    const std::uint64_t white_seed = rng.next_u64();

    const Segment eog_dom = compose_mixed(x, eog_src, emg_src, report.snr_dominant_db,
                                          report.snr_subdominant_db, report.snr_white_db, white_seed);
    const Segment emg_dom = compose_mixed(x, emg_src, eog_src, report.snr_dominant_db,
                                          report.snr_subdominant_db, report.snr_white_db, white_seed);
    eog_dom_preds.push_back(pipeline.predict(eog_dom.samples, extractor).label);
    emg_dom_preds.push_back(pipeline.predict(emg_dom.samples, extractor).label);
  }
  const auto names = class_names(Task::Ternary);
  report.eog_dominant = confusion(eog_dom_preds,
                                  std::vector<int>(clean_test.size(), static_cast<int>(SegmentLabel::EOG)),
                                  3, names);
  report.emg_dominant = confusion(emg_dom_preds,
                                  std::vector<int>(clean_test.size(), static_cast<int>(SegmentLabel::EMG)),
                                  3, names);
  return report;
}

std::string machine_descriptor() {
  std::string cpu = "unknown cpu";
  std::ifstream info("/proc/cpuinfo");
  for (std::string line; std::getline(info, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) cpu = line.substr(colon + 2);
      break;
    }
  }
  std::ostringstream s;
  utsname u{};
  if (uname(&u) == 0) s << u.sysname << ' ' << u.release << ' ' << u.machine << "; ";
  s << cpu << "; " << std::thread::hardware_concurrency() << " hardware threads";
  return s.str();
}

BenchResult benchmark_training(const Mlp& initial, const LabeledMatrix& train_set,
                               const LabeledMatrix& val_set, TrainConfig config) {
  config.max_epochs = kBenchEpochs;
  config.early_stopping = false;
  const TrainResult r = train(initial, train_set, val_set, config);
  BenchResult bench;
  bench.wall_time_s = r.wall_time_s;
  bench.epochs_run = r.epochs_run;
  bench.train_rows = train_set.size();
  bench.input_dim = initial.input_dim();
  bench.machine = machine_descriptor();
  return bench;
}

namespace {

ordered_json to_json(const ConfusionMatrix& m) {
  ordered_json j;
  j["class_names"] = m.class_names;
  ordered_json rows = ordered_json::array();
  for (std::size_t t = 0; t < m.n_classes; ++t) {
    std::vector<std::size_t> row(m.counts.begin() + static_cast<std::ptrdiff_t>(t * m.n_classes),
                                 m.counts.begin() + static_cast<std::ptrdiff_t>((t + 1) * m.n_classes));
    rows.push_back(row);
  }
  j["counts"] = rows;
  j["total"] = m.total();
  j["accuracy"] = m.accuracy();
  return j;
}

ordered_json to_json(const RunMetadata& meta) {
  return ordered_json{{"seed", meta.seed},
                      {"config_hash", meta.config_hash},
                      {"dataset_hash", meta.dataset_hash},
                      {"tool_version", meta.tool_version}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace

std::string snr_table_csv(const SnrAccuracyTable& table) {
  std::string out = "snr_db,acc_overall,acc_eog,acc_emg,n\n";
  char line[128];
  for (const auto& row : table.rows) {
    std::snprintf(line, sizeof line, "%d,%.6f,%.6f,%.6f,%zu\n", row.snr_db, row.accuracy_overall(),
                  row.accuracy_eog(), row.accuracy_emg(), row.n());
    out += line;
  }
  return out;
}

void emit_report(const SnrAccuracyTable& table, const RunMetadata& meta,
                 const std::filesystem::path& out_dir) {
  const std::string task(to_string(table.task));
  write_text(out_dir / ("snr_table_" + task + ".csv"), snr_table_csv(table));

  ordered_json j;
  j["task"] = task;
  j["metadata"] = to_json(meta);
  j["metadata"]["acc_overall_denominator"] = "clean + eog_noisy + emg_noisy per level";
  j["metadata"]["acc_eog_meaning"] =
      table.task == Task::Binary ? "EOG detection rate (noisy recall)" : "EOG class recall";
  ordered_json levels = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json l;
    l["snr_db"] = row.snr_db;
    l["n"] = row.n();
    l["acc_overall"] = row.accuracy_overall();
    l["acc_overall_noisy_only"] = row.accuracy_noisy_only();
    l["acc_clean"] = row.accuracy_clean();
    l["acc_eog"] = row.accuracy_eog();
    l["acc_emg"] = row.accuracy_emg();
    l["confusion"] = {{"overall", to_json(row.overall)},
                      {"clean", to_json(row.clean)},
                      {"eog", to_json(row.eog)},
                      {"emg", to_json(row.emg)}};
    if (table.task == Task::Binary) {
      ConfusionMatrix eog_detection = row.clean;
      eog_detection += row.eog;
      ConfusionMatrix emg_detection = row.clean;
      emg_detection += row.emg;
      l["confusion"]["eog_detection"] = to_json(eog_detection);
      l["confusion"]["emg_detection"] = to_json(emg_detection);
    }
    levels.push_back(l);
  }
  j["levels"] = levels;
  write_text(out_dir / ("confusion_" + task + ".json"), j.dump(2) + "\n");
}

void emit_report(const MixedReport& report, const RunMetadata& meta,
                 const std::filesystem::path& out_dir) {
  const auto write_one = [&](const char* scenario, const char* dominant, const char* subdominant,
                             const ConfusionMatrix& m) {
    ordered_json j;
    j["scenario"] = scenario;
    j["metadata"] = to_json(meta);
    j["dominant"] = dominant;
    j["subdominant"] = subdominant;
    j["snr_dominant_db"] = report.snr_dominant_db;
    j["snr_subdominant_db"] = report.snr_subdominant_db;
    j["snr_white_db"] = report.snr_white_db;
    j["confusion"] = to_json(m);
    write_text(out_dir / ("confusion_" + std::string(scenario) + ".json"), j.dump(2) + "\n");
  };
  write_one("mixed_eog_dominant", "EOG", "EMG", report.eog_dominant);
  write_one("mixed_emg_dominant", "EMG", "EOG", report.emg_dominant);
}

void emit_report(const BenchResult& bench, const RunMetadata& meta,
                 const std::filesystem::path& out_dir) {
  ordered_json j;
  j["metadata"] = to_json(meta);
  j["epochs_run"] = bench.epochs_run;
  j["wall_time_s"] = bench.wall_time_s;
  j["train_rows"] = bench.train_rows;
  j["input_dim"] = bench.input_dim;
  j["machine"] = bench.machine;
  write_text(out_dir / "bench.json", j.dump(2) + "\n");
}

}  // namespace eegart
