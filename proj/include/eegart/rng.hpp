#pragma once

#include <cstddef>
#include <cstdint>

namespace eegart {

/// Independent random substreams. The numeric tag is mixed into the seed, so
/// adding a stream never perturbs the draws of an existing one.
enum class Stream : std::uint64_t {
  Split = 1,
  Pairing = 2,
  TrainSnr = 3,
  TestBank = 4,
  WhiteNoise = 5,
  Mixed = 6,
  Init = 7,
  Shuffle = 8,
  Dropout = 9,
};

/// Counter-based generator built on the SplitMix64 finalizer.
///
/// Draw k of a stream is mix(key + k * 0x9E3779B97F4A7C15), where mix is
///   z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
///   z ^= z >> 27; z *= 0x94D049BB133111EB;
///   z ^= z >> 31;
/// and key = mix(mix(seed) + stream_tag). Uniform doubles take the top 53 bits;
/// Gaussians use the Box-Muller transform on two consecutive uniforms.
class Rng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  Rng(std::uint64_t seed, Stream stream);

  static std::uint64_t mix(std::uint64_t z) noexcept;
  static std::uint64_t stream_key(std::uint64_t seed, Stream stream) noexcept;
  /// Stateless access to draw `counter` of the stream identified by `key`.
  static double uniform_at(std::uint64_t key, std::uint64_t counter) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1).
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;
  /// Unbiased integer in [0, n); n must be > 0.
  std::size_t below(std::size_t n) noexcept;
  double gaussian() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace eegart
