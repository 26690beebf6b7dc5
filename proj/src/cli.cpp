#include "eegart/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "eegart/error.hpp"
#include "eegart/eval.hpp"
#include "eegart/hash.hpp"
#include "eegart/npy.hpp"

#ifndef EEGART_VERSION
#define EEGART_VERSION "0.0.0"
#endif

namespace eegart::cli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kToolVersion = "eegart " EEGART_VERSION;

const std::vector<std::pair<std::string, std::string>>& defaults() {
  static const std::vector<std::pair<std::string, std::string>> d = {
      {"clean_path", ""},
      {"eog_path", ""},
      {"emg_path", ""},
      {"out_dir", "eegart_out"},
      {"seed", ""},
      {"task", "ternary"},
      {"snr_levels", "-7,-6,-5,-4,-3,-2,0,1,2,3,4,5,6"},
      {"welch_segment_length", "256"},
      {"welch_overlap", "128"},
      {"log_epsilon", "1e-12"},
      {"variance_target", "0.95"},
      {"dropout_p", "0.6"},
      {"batch_size", "32"},
      {"lr0", "0.001"},
      {"max_epochs", "100"},
      {"early_stop_patience", "20"},
      {"early_stop_threshold", "0.0001"},
      {"scheduler_factor", "0.5"},
      {"scheduler_patience", "5"},
      {"scheduler_min_lr", "1e-6"},
      {"scheduler_threshold", "0.0001"},
      {"model", ""},
  };
  return d;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& [k, v] : defaults()) values_[k] = v;
}

const std::vector<std::string>& RunConfig::known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [key, value] : defaults()) k.push_back(key);
    return k;
  }();
  return keys;
}

void RunConfig::load_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  parse_text(ss.str(), path.string());
}

void RunConfig::parse_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::ConfigError, origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (values_.find(key) == values_.end()) fail(ErrorCode::ConfigError, "unknown config key '" + key + "'");
  values_[key] = value;
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorCode::ConfigError, "unknown config key '" + key + "'");
  return it->second;
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& s = get(key);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::ConfigError, key + ": '" + s + "' is not a number");
  }
  return v;
}

long long RunConfig::get_int(const std::string& key) const {
  const std::string& s = get(key);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::ConfigError, key + ": '" + s + "' is not an integer");
  }
  return v;
}

std::uint64_t RunConfig::seed() const {
  const std::string& s = get("seed");
  if (s.empty()) fail(ErrorCode::ConfigError, "seed is required (set it in the config or with --seed)");
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::ConfigError, "seed: '" + s + "' is not a non-negative integer");
  }
  return v;
}

Task RunConfig::task() const { return parse_task(get("task")); }

std::vector<int> RunConfig::snr_levels() const {
  std::vector<int> levels;
  std::stringstream ss(get("snr_levels"));
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      fail(ErrorCode::ConfigError, "snr_levels: '" + item + "' is not an integer");
    }
    levels.push_back(v);
  }
  return levels;
}

FeatureConfig RunConfig::feature_config() const {
  FeatureConfig f;
  const auto len = get_int("welch_segment_length");
  const auto overlap = get_int("welch_overlap");
  if (len < 0 || overlap < 0) fail(ErrorCode::ConfigError, "Welch sizes must be non-negative");
  f.psd.segment_length = static_cast<std::size_t>(len);
  f.psd.overlap = static_cast<std::size_t>(overlap);
  f.psd.log_epsilon = get_double("log_epsilon");
  f.validate();
  return f;
}

PipelineOptions RunConfig::pipeline_options() const {
  PipelineOptions o;
  o.task = task();
  o.features = feature_config();
  o.variance_target = get_double("variance_target");
  o.dropout_p = get_double("dropout_p");
  const auto batch = get_int("batch_size");
  if (batch < 1) fail(ErrorCode::ConfigError, "batch_size must be >= 1");
  o.train.batch_size = static_cast<std::size_t>(batch);
  o.train.lr0 = get_double("lr0");
  o.train.max_epochs = static_cast<int>(get_int("max_epochs"));
  o.train.early_stop_patience = static_cast<int>(get_int("early_stop_patience"));
  o.train.early_stop_threshold = get_double("early_stop_threshold");
  o.train.scheduler.factor = get_double("scheduler_factor");
  o.train.scheduler.patience = static_cast<int>(get_int("scheduler_patience"));
  o.train.scheduler.min_lr = get_double("scheduler_min_lr");
  o.train.scheduler.threshold = get_double("scheduler_threshold");
  o.train.seed = seed();
  o.train.validate();
  return o;
}

fs::path RunConfig::model_path() const {
  if (has_value("model")) return get("model");
  return out_dir() / ("model_" + std::string(to_string(task())) + ".json");
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidCutoff:
      return kExitConfigError;
    case ErrorCode::IoError:
      return kExitIoError;
    default:
      return kExitDataError;
  }
}

namespace {

struct Datasets {
  SegmentSet clean, eog, emg;
  std::map<std::string, std::string> hashes;
};

fs::path required_path(const RunConfig& cfg, const std::string& key) {
  if (!cfg.has_value(key)) fail(ErrorCode::ConfigError, key + " is required for this subcommand");
  fs::path p = cfg.get(key);
  if (!fs::exists(p)) fail(ErrorCode::IoError, key + ": " + p.string() + " does not exist");
  return p;
}

Datasets load_datasets(const RunConfig& cfg) {
  Datasets d;
  const auto clean = required_path(cfg, "clean_path");
  const auto eog = required_path(cfg, "eog_path");
  const auto emg = required_path(cfg, "emg_path");
  d.clean = read_npy(clean, SetKind::CleanEEG);
  d.eog = read_npy(eog, SetKind::EOG);
  d.emg = read_npy(emg, SetKind::EMG);
  d.hashes["clean"] = file_hash(clean);
  d.hashes["eog"] = file_hash(eog);
  d.hashes["emg"] = file_hash(emg);
  return d;
}

std::string dataset_hash(const std::map<std::string, std::string>& hashes) {
  Fnv1a h;
  for (const auto& [k, v] : hashes) h.update(k + "=" + v + "\n");
  return h.hex();
}

RunMetadata metadata(const RunConfig& cfg, const std::map<std::string, std::string>& hashes,
                     std::uint64_t seed) {
  RunMetadata m;
  m.seed = seed;
  m.config_hash = fnv1a_hex(cfg.canonical());
  m.dataset_hash = hashes.empty() ? "" : dataset_hash(hashes);
  m.tool_version = kToolVersion;
  return m;
}

void write_json_file(const fs::path& path, const ordered_json& j) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

void write_manifest(const RunConfig& cfg, const std::string& subcommand,
                    const std::map<std::string, std::string>& hashes,
                    const std::vector<std::string>& outputs) {
  ordered_json j;
  j["tool_version"] = kToolVersion;
  j["subcommand"] = subcommand;
  j["seed"] = cfg.get("seed");
  j["config_hash"] = fnv1a_hex(cfg.canonical());
  ordered_json config = ordered_json::object();
  for (const auto& key : RunConfig::known_keys()) config[key] = cfg.get(key);
  j["config"] = config;
  ordered_json files = ordered_json::object();
  for (const auto& [k, v] : hashes) files[k] = v;
  j["dataset_hashes"] = files;
  j["dataset_hash"] = hashes.empty() ? "" : dataset_hash(hashes);
  j["outputs"] = outputs;
  write_json_file(cfg.out_dir() / ("manifest_" + subcommand + ".json"), j);
}

ordered_json split_json(const DatasetSplit& s) {
  const auto pairs = [](const std::vector<NoisyPair>& v) {
    ordered_json a = ordered_json::array();
    for (const auto& p : v) {
      a.push_back({{"clean", p.clean_index},
                   {"noise", p.noise_index},
                   {"kind", std::string(to_string(p.kind))},
                   {"snr_db", p.snr_db}});
    }
    return a;
  };
  ordered_json j;
  j["seed"] = s.seed;
  j["counts"] = {{"train_clean", s.train_clean.size()},
                 {"val_clean", s.val_clean.size()},
                 {"test_clean", s.test_clean.size()},
                 {"train_noisy", s.train_noisy.size()},
                 {"val_noisy", s.val_noisy.size()}};
  j["train_clean"] = s.train_clean;
  j["val_clean"] = s.val_clean;
  j["test_clean"] = s.test_clean;
  j["train_noisy"] = pairs(s.train_noisy);
  j["val_noisy"] = pairs(s.val_noisy);
  return j;
}

// Recomputes the split from the seed and, when `prepare` already wrote one,
// checks that both agree.
DatasetSplit consistent_split(const RunConfig& cfg, const Datasets& d) {
  DatasetSplit split = split_dataset(d.clean, d.eog, d.emg, cfg.seed());
  const fs::path stored = cfg.out_dir() / "split.json";
  if (fs::exists(stored)) {
    std::ifstream in(stored);
    try {
      const auto j = nlohmann::json::parse(in);
      if (j.at("test_clean").get<std::vector<std::size_t>>() != split.test_clean ||
          j.at("train_clean").get<std::vector<std::size_t>>() != split.train_clean) {
        fail(ErrorCode::ConfigError, stored.string() +
                                         " was produced with a different seed or dataset; rerun prepare");
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::IoError, stored.string() + ": " + e.what());
    }
  }
  return split;
}

std::vector<std::size_t> train_val_indices(const DatasetSplit& split) {
  std::vector<std::size_t> idx = split.train_clean;
  idx.insert(idx.end(), split.val_clean.begin(), split.val_clean.end());
  std::sort(idx.begin(), idx.end());
  return idx;
}

int cmd_prepare(const RunConfig& cfg, std::ostream& out) {
  const auto seed = cfg.seed();
  const auto levels = cfg.snr_levels();
  const Datasets d = load_datasets(cfg);
  const DatasetSplit split = split_dataset(d.clean, d.eog, d.emg, seed);
  const TestBank bank = build_test_bank(d.clean, split.test_clean, d.eog, d.emg, levels, seed);

  const fs::path dir = cfg.out_dir();
  write_json_file(dir / "split.json", split_json(split));
  save_test_bank(bank, dir / "bank");
  write_manifest(cfg, "prepare", d.hashes, {"split.json", "bank/"});
  out << "prepared " << split.train_clean.size() << " train / " << split.val_clean.size()
      << " val / " << split.test_clean.size() << " test clean segments, " << levels.size()
      << " SNR levels in " << (dir / "bank").string() << '\n';
  return kExitOk;
}

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const PipelineOptions options = cfg.pipeline_options();
  const Datasets d = load_datasets(cfg);
  const DatasetSplit split = consistent_split(cfg, d);
  const auto train_corpus = assemble_corpus(split.train_clean, split.train_noisy, d.clean, d.eog, d.emg);
  const auto val_corpus = assemble_corpus(split.val_clean, split.val_noisy, d.clean, d.eog, d.emg);

  const FitOutcome fit = fit_pipeline(train_corpus, val_corpus, train_val_indices(split), options);
  for (std::size_t c : fit.pipeline.scaler.clamped_columns) {
    err << "warning: feature column " << c << " has zero variance; its scale was clamped to 1\n";
  }

  const fs::path model_path = cfg.model_path();
  std::error_code ec;
  fs::create_directories(model_path.parent_path().empty() ? fs::path(".") : model_path.parent_path(), ec);
  save_model(fit.pipeline, model_path);

  const std::string task(to_string(options.task));
  const fs::path history_path = cfg.out_dir() / ("history_" + task + ".csv");
  std::ofstream hist(history_path);
  if (!hist) fail(ErrorCode::IoError, "cannot write " + history_path.string());
  hist << "epoch,train_loss,val_loss,val_accuracy,lr\n";
  char line[160];
  for (const auto& r : fit.training.history) {
    std::snprintf(line, sizeof line, "%d,%.9g,%.9g,%.6f,%.9g\n", r.epoch, r.train_loss, r.val_loss,
                  r.val_accuracy, r.lr);
    hist << line;
  }

  write_manifest(cfg, "train_" + task, d.hashes,
                 {model_path.string(), history_path.filename().string()});
  out << "trained " << task << " model: " << fit.pipeline.pca.k() << " PCA components, "
      << fit.training.epochs_run << " epochs (best " << fit.training.best_epoch
      << "), val accuracy " << fit.pipeline.metrics.at("best_val_accuracy") << " -> "
      << model_path.string() << '\n';
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
  const Pipeline pipeline = load_model(cfg.model_path());
  const TestBank bank = load_test_bank(cfg.out_dir() / "bank");
  const SnrAccuracyTable table = evaluate_bank(pipeline, bank, pipeline.task);
  std::map<std::string, std::string> hashes;
  hashes["model"] = file_hash(cfg.model_path());
  hashes["bank"] = file_hash(cfg.out_dir() / "bank" / "bank.json");
  emit_report(table, metadata(cfg, hashes, pipeline.seed), cfg.out_dir());
  const std::string task(to_string(pipeline.task));
  write_manifest(cfg, "eval_" + task, hashes,
                 {"snr_table_" + task + ".csv", "confusion_" + task + ".json"});
  out << snr_table_csv(table);
  return kExitOk;
}

int cmd_mixed(const RunConfig& cfg, std::ostream& out) {
  const auto seed = cfg.seed();
  const Pipeline pipeline = load_model(cfg.model_path());
  const Datasets d = load_datasets(cfg);
  const DatasetSplit split = consistent_split(cfg, d);
  const MixedReport report = mixed_scenario_report(pipeline, d.clean, split.test_clean, d.eog, d.emg, seed);
  emit_report(report, metadata(cfg, d.hashes, seed), cfg.out_dir());
  write_manifest(cfg, "mixed", d.hashes,
                 {"confusion_mixed_eog_dominant.json", "confusion_mixed_emg_dominant.json"});
  out << "EOG-dominant accuracy " << report.eog_dominant.accuracy() << " ("
      << report.eog_dominant.correct() << "/" << report.eog_dominant.total() << ", "
      << report.eog_dominant.at(1, 0) << " as Clean)\n"
      << "EMG-dominant accuracy " << report.emg_dominant.accuracy() << " ("
      << report.emg_dominant.correct() << "/" << report.emg_dominant.total() << ")\n";
  return kExitOk;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out) {
  const PipelineOptions options = cfg.pipeline_options();
  const Datasets d = load_datasets(cfg);
  const DatasetSplit split = consistent_split(cfg, d);
  const auto train_corpus = assemble_corpus(split.train_clean, split.train_noisy, d.clean, d.eog, d.emg);
  const auto val_corpus = assemble_corpus(split.val_clean, split.val_noisy, d.clean, d.eog, d.emg);

  const FeatureExtractor extractor(options.features);
  const Matrix train_features = feature_matrix(train_corpus, extractor);
  Pipeline p;
  p.task = options.task;
  p.features = options.features;
  p.scaler = fit_scaler(train_features);
  p.pca = fit_pca(p.scaler.transform(train_features), options.variance_target);
  const LabeledMatrix train_set = project_corpus(p, train_corpus);
  const LabeledMatrix val_set = project_corpus(p, val_corpus);
  const Mlp initial = init_mlp(p.pca.k(), class_count(p.task), options.train.seed, options.dropout_p);

  const BenchResult bench = benchmark_training(initial, train_set, val_set, options.train);
  emit_report(bench, metadata(cfg, d.hashes, options.train.seed), cfg.out_dir());
  write_manifest(cfg, "bench", d.hashes, {"bench.json"});
  out << "trained " << bench.epochs_run << " epochs on " << bench.train_rows << " rows in "
      << bench.wall_time_s << " s (" << bench.machine << ")\n";
  return kExitOk;
}

int cmd_classify(const RunConfig& cfg, const std::string& input, std::ostream& out) {
  const Pipeline pipeline = load_model(cfg.model_path());
  const SegmentSet segments = read_npy(input);
  const FeatureExtractor extractor(pipeline.features);
  const auto names = class_names(pipeline.task);
  char buf[32];
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Prediction p = pipeline.predict(segments.row(i), extractor);
    out << i << '\t' << names[static_cast<std::size_t>(p.label)];
    for (double prob : p.probabilities) {
      std::snprintf(buf, sizeof buf, "\t%.6f", prob);
      out << buf;
    }
    out << '\n';
  }
  return kExitOk;
}

std::string help_footer() {
  std::string s =
      "\nConfig file: one `key = value` per line, '#' starts a comment.\n"
      "Precedence (lowest first): defaults, --config, --set KEY=VALUE, dedicated flags.\n"
      "Keys:";
  for (const auto& [k, v] : defaults()) s += "\n  " + k + (v.empty() ? "" : " (default " + v + ")");
  s +=
      "\n\nExit codes: 0 success, 2 configuration/usage error, 3 I/O error,"
      " 4 data error, 5 internal error.\n";
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"EEG artifact detection and classification (EOG / EMG / clean)", "eegart"};
  app.footer(help_footer());
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string config_file;
  std::vector<std::string> overrides;
  std::string seed, out_dir, task, clean, eog, emg, model, input;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_file, "Config file of key = value lines");
    sub->add_option("--set", overrides, "Override one config key (KEY=VALUE), repeatable");
    sub->add_option("--seed", seed, "Seed for every random choice");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--task", task, "binary or ternary");
    sub->add_option("--clean", clean, "Clean EEG segments (NPY, N x 512)");
    sub->add_option("--eog", eog, "EOG segments (NPY, N x 512)");
    sub->add_option("--emg", emg, "EMG segments (NPY, N x 512)");
    sub->add_option("--model", model, "Model file (default <out>/model_<task>.json)");
  };
  add_common(app.add_subcommand("prepare", "Build the train/val/test split and the SNR test bank"));
  add_common(app.add_subcommand("train", "Fit scaler, PCA and MLP; write the model file"));
  add_common(app.add_subcommand("eval", "Accuracy-vs-SNR table and confusion matrices on the test bank"));
  add_common(app.add_subcommand("mixed", "Dominant/subdominant + white-noise scenario"));
  add_common(app.add_subcommand("bench", "Time 50 training epochs"));
  auto* classify = app.add_subcommand("classify", "Label every segment of an NPY file");
  add_common(classify);
  classify->add_option("input", input, "NPY file of N x 512 segments")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitConfigError;
  }

  try {
    RunConfig cfg;
    if (!config_file.empty()) cfg.load_file(config_file);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) fail(ErrorCode::ConfigError, "--set expects KEY=VALUE, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    const std::pair<const char*, const std::string*> flags[] = {
        {"seed", &seed}, {"out_dir", &out_dir}, {"task", &task}, {"clean_path", &clean},
        {"eog_path", &eog}, {"emg_path", &emg}, {"model", &model}};
    for (const auto& [key, value] : flags) {
      if (!value->empty()) cfg.set(key, *value);
    }

    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "prepare") return cmd_prepare(cfg, out);
    if (name == "train") return cmd_train(cfg, out, err);
    if (name == "eval") return cmd_eval(cfg, out);
    if (name == "mixed") return cmd_mixed(cfg, out);
    if (name == "bench") return cmd_bench(cfg, out);
    return cmd_classify(cfg, input, out);
  } catch (const Error& e) {
    err << "eegart: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "eegart: internal error: " << e.what() << '\n';
    return kExitInternalError;
  }
}

}  // namespace eegart::cli
