#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "eegart/dataset.hpp"
#include "eegart/error.hpp"
#include "eegart/features.hpp"
#include "eegart/pipeline.hpp"

namespace eegart::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitIoError = 3,
  kExitDataError = 4,
  kExitInternalError = 5,
};

/// Flat `key = value` settings. Lines starting with '#' are comments.
/// Precedence, lowest first: built-in defaults, --config file, --set, and the
/// dedicated flags (--seed, --out, --task, --clean, --eog, --emg, --model).
class RunConfig {
 public:
  RunConfig();

  static const std::vector<std::string>& known_keys();

  void load_file(const std::filesystem::path& path);
  void parse_text(const std::string& text, const std::string& origin);
  /// Throws ConfigError for unknown keys.
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  bool has_value(const std::string& key) const { return !get(key).empty(); }
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::uint64_t seed() const;

  Task task() const;
  std::vector<int> snr_levels() const;
  FeatureConfig feature_config() const;
  PipelineOptions pipeline_options() const;
  std::filesystem::path out_dir() const { return get("out_dir"); }
  std::filesystem::path model_path() const;

  /// Sorted `key=value` lines; the config hash is taken over this text.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
};

int exit_code_for(ErrorCode code);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace eegart::cli
