#include "eegart/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <string>

#include <json.hpp>

#include "eegart/error.hpp"
#include "eegart/npy.hpp"
#include "eegart/rng.hpp"
#include "eegart/signal.hpp"

namespace eegart {

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
  return idx;
}

const SegmentSet& pool_for(NoiseKind kind, const SegmentSet& eog, const SegmentSet& emg) {
  if (kind == NoiseKind::EOG) return eog;
  if (kind == NoiseKind::EMG) return emg;
  fail(ErrorCode::ConfigError, "noisy pairs must reference EOG or EMG segments");
}

}  // namespace

DatasetSplit split_dataset(const SegmentSet& clean, const SegmentSet& eog, const SegmentSet& emg,
                           std::uint64_t seed, const SplitConfig& config) {
  const std::size_t n = clean.size();
  const std::size_t n_test = n * config.test_percent / 100;
  const std::size_t n_rest = n - n_test;
  const std::size_t n_val = n_rest * config.val_percent / 100;
  const std::size_t n_train = n_rest - n_val;
  if (n_test == 0 || n_val == 0 || n_train == 0) {
    fail(ErrorCode::InsufficientData, std::to_string(n) + " clean segments cannot fill test/val/train");
  }
  if (eog.size() == 0 || emg.size() == 0) {
    fail(ErrorCode::InsufficientData, "EOG and EMG pools must be non-empty");
  }
  if (!(config.snr_min_db <= config.snr_max_db)) {
    fail(ErrorCode::ConfigError, "SNR range is empty");
  }

  DatasetSplit split;
  split.seed = seed;

  Rng split_rng(seed, Stream::Split);
  const auto perm = shuffled_indices(n, split_rng);
  split.test_clean.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  split.val_clean.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test),
                         perm.begin() + static_cast<std::ptrdiff_t>(n_test + n_val));
  split.train_clean.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test + n_val), perm.end());
  std::sort(split.test_clean.begin(), split.test_clean.end());
  std::sort(split.val_clean.begin(), split.val_clean.end());
  std::sort(split.train_clean.begin(), split.train_clean.end());

  Rng pair_rng(seed, Stream::Pairing);
  Rng snr_rng(seed, Stream::TrainSnr);
  const auto pair_up = [&](const std::vector<std::size_t>& indices, std::vector<NoisyPair>& out) {
    out.reserve(2 * indices.size());
    for (NoiseKind kind : {NoiseKind::EOG, NoiseKind::EMG}) {
      const std::size_t pool = kind == NoiseKind::EOG ? eog.size() : emg.size();
      for (std::size_t c : indices) {
        NoisyPair p;
        p.clean_index = c;
        p.kind = kind;
        p.noise_index = pair_rng.below(pool);
        p.snr_db = snr_rng.uniform(config.snr_min_db, config.snr_max_db);
        out.push_back(p);
      }
    }
  };
  pair_up(split.train_clean, split.train_noisy);
  pair_up(split.val_clean, split.val_noisy);
  return split;
}

void LabeledSegments::append(std::span<const double> samples, SegmentLabel label) {
  data.insert(data.end(), samples.begin(), samples.end());
  labels.push_back(label);
  ++rows;
}

LabeledSegments assemble_corpus(std::span<const std::size_t> clean_indices,
                                std::span<const NoisyPair> noisy, const SegmentSet& clean,
                                const SegmentSet& eog, const SegmentSet& emg) {
  LabeledSegments out;
  out.data.reserve((clean_indices.size() + noisy.size()) * kSegmentLength);
  for (std::size_t c : clean_indices) {
    if (c >= clean.size()) fail(ErrorCode::InsufficientData, "clean index out of range");
    out.append(normalize_samples(clean.row(c)), SegmentLabel::Clean);
  }
  std::vector<double> mixed(kSegmentLength);
  for (const NoisyPair& p : noisy) {
    const SegmentSet& pool = pool_for(p.kind, eog, emg);
    if (p.clean_index >= clean.size() || p.noise_index >= pool.size()) {
      fail(ErrorCode::InsufficientData, "noisy pair index out of range");
    }
    const auto x = clean.row(p.clean_index);
    const auto eta = pool.row(p.noise_index);
    const double lambda = lambda_for_snr(x, eta, p.snr_db);
    for (std::size_t i = 0; i < kSegmentLength; ++i) mixed[i] = x[i] + lambda * eta[i];
    out.append(normalize_samples(mixed), label_for(p.kind));
  }
  return out;
}

TestBank build_test_bank(const SegmentSet& clean, std::span<const std::size_t> clean_test,
                         const SegmentSet& eog, const SegmentSet& emg,
                         std::span<const int> snr_levels, std::uint64_t seed) {
  if (snr_levels.size() != kTestBankLevelCount) {
    fail(ErrorCode::ConfigError, "test bank needs exactly 13 SNR levels, got " +
                                     std::to_string(snr_levels.size()));
  }
  std::set<int> distinct(snr_levels.begin(), snr_levels.end());
  if (distinct.size() != snr_levels.size()) fail(ErrorCode::ConfigError, "SNR levels repeat");
  for (int level : snr_levels) {
    if (level < kMinSnrDb || level > kMaxSnrDb) {
      fail(ErrorCode::ConfigError, "SNR level " + std::to_string(level) + " outside [-7, 6] dB");
    }
  }
  const std::size_t n = clean_test.size();
  if (n == 0) fail(ErrorCode::InsufficientData, "no clean test segments");
  if (eog.size() < n || emg.size() < n) {
    fail(ErrorCode::InsufficientNoiseSegments,
         std::to_string(n) + " test segments need as many EOG and EMG segments");
  }

  TestBank bank;
  bank.seed = seed;
  bank.clean_indices.assign(clean_test.begin(), clean_test.end());
  bank.clean.reserve(n * kSegmentLength);
  for (std::size_t c : clean_test) {
    if (c >= clean.size()) fail(ErrorCode::InsufficientData, "clean test index out of range");
    const auto row = clean.row(c);
    bank.clean.insert(bank.clean.end(), row.begin(), row.end());
  }

  // Partial Fisher-Yates: the first n entries of each permutation.
  Rng rng(seed, Stream::TestBank);
  auto draw = [&](std::size_t pool) {
    auto perm = shuffled_indices(pool, rng);
    perm.resize(n);
    return perm;
  };
  bank.eog_indices = draw(eog.size());
  bank.emg_indices = draw(emg.size());

  for (int level : snr_levels) {
    TestBankLevel lv;
    lv.snr_db = level;
    lv.eog_noisy.resize(n * kSegmentLength);
    lv.emg_noisy.resize(n * kSegmentLength);
    lv.eog_lambda.resize(n);
    lv.emg_lambda.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = TestBank::row(bank.clean, i);
      const auto mix_into = [&](std::span<const double> eta, std::vector<double>& dst,
                                double& lambda_out) {
        const double lambda = lambda_for_snr(x, eta, static_cast<double>(level));
        lambda_out = lambda;
        double* out = dst.data() + i * kSegmentLength;
        for (std::size_t t = 0; t < kSegmentLength; ++t) out[t] = x[t] + lambda * eta[t];
      };
      mix_into(eog.row(bank.eog_indices[i]), lv.eog_noisy, lv.eog_lambda[i]);
      mix_into(emg.row(bank.emg_indices[i]), lv.emg_noisy, lv.emg_lambda[i]);
    }
    bank.levels.push_back(std::move(lv));
  }
  return bank;
}

void check_no_leakage(const TestBank& bank, std::span<const std::size_t> training_indices) {
  std::set<std::size_t> seen(training_indices.begin(), training_indices.end());
  for (std::size_t c : bank.clean_indices) {
    if (seen.count(c) != 0) {
      fail(ErrorCode::LeakageError,
           "clean segment " + std::to_string(c) + " is in both the test bank and training data");
    }
  }
}

std::filesystem::path level_directory(const std::filesystem::path& bank_dir, int snr_db) {
  return bank_dir / ("snr_" + std::to_string(snr_db));
}

namespace {

nlohmann::ordered_json lambda_stats(const std::vector<double>& lambdas) {
  nlohmann::ordered_json j;
  if (lambdas.empty()) return j;
  const auto [lo, hi] = std::minmax_element(lambdas.begin(), lambdas.end());
  j["min"] = *lo;
  j["max"] = *hi;
  j["mean"] = std::accumulate(lambdas.begin(), lambdas.end(), 0.0) /
              static_cast<double>(lambdas.size());
  return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::IoError, path.string() + ": " + e.what());
  }
}

}  // namespace

void save_test_bank(const TestBank& bank, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  const std::size_t n = bank.size();
  nlohmann::ordered_json top;
  top["seed"] = bank.seed;
  top["count"] = n;
  std::vector<int> levels;
  for (const auto& lv : bank.levels) levels.push_back(lv.snr_db);
  top["snr_levels"] = levels;
  top["clean_indices"] = bank.clean_indices;
  top["eog_indices"] = bank.eog_indices;
  top["emg_indices"] = bank.emg_indices;
  write_json(dir / "bank.json", top);

  for (const auto& lv : bank.levels) {
    const auto level_dir = level_directory(dir, lv.snr_db);
    std::filesystem::create_directories(level_dir, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create " + level_dir.string());
    write_npy(level_dir / "clean.npy", n, kSegmentLength, bank.clean);
    write_npy(level_dir / "eog.npy", n, kSegmentLength, lv.eog_noisy);
    write_npy(level_dir / "emg.npy", n, kSegmentLength, lv.emg_noisy);

    nlohmann::ordered_json m;
    m["snr_db"] = lv.snr_db;
    m["seed"] = bank.seed;
    m["counts"] = {{"clean", n}, {"eog", n}, {"emg", n}};
    m["lambda"] = {{"eog", lambda_stats(lv.eog_lambda)}, {"emg", lambda_stats(lv.emg_lambda)}};
    write_json(level_dir / "manifest.json", m);
  }
}

TestBank load_test_bank(const std::filesystem::path& dir) {
  const auto top = read_json(dir / "bank.json");
  TestBank bank;
  try {
    bank.seed = top.at("seed").get<std::uint64_t>();
    bank.clean_indices = top.at("clean_indices").get<std::vector<std::size_t>>();
    bank.eog_indices = top.at("eog_indices").get<std::vector<std::size_t>>();
    bank.emg_indices = top.at("emg_indices").get<std::vector<std::size_t>>();
    const auto levels = top.at("snr_levels").get<std::vector<int>>();
    const std::size_t n = bank.clean_indices.size();
    for (int level : levels) {
      const auto level_dir = level_directory(dir, level);
      const auto load = [&](const char* name) {
        SegmentSet s = read_npy(level_dir / name);
        if (s.size() != n) {
          fail(ErrorCode::ShapeError, (level_dir / name).string() + " row count differs from bank.json");
        }
        return std::move(s.data);
      };
      if (bank.clean.empty()) bank.clean = load("clean.npy");
      TestBankLevel lv;
      lv.snr_db = level;
      lv.eog_noisy = load("eog.npy");
      lv.emg_noisy = load("emg.npy");
      bank.levels.push_back(std::move(lv));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::IoError, (dir / "bank.json").string() + ": " + e.what());
  }
  return bank;
}

}  // namespace eegart
