#include "eegart/rng.hpp"

#include <cmath>
#include <numbers>

namespace eegart {

Rng::Rng(std::uint64_t seed, Stream stream) : key_(stream_key(seed, stream)) {}

std::uint64_t Rng::mix(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

std::uint64_t Rng::stream_key(std::uint64_t seed, Stream stream) noexcept {
  return mix(mix(seed) + static_cast<std::uint64_t>(stream));
}

double Rng::uniform_at(std::uint64_t key, std::uint64_t counter) noexcept {
  return static_cast<double>(mix(key + counter * kGolden) >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::next_u64() noexcept {
  ++counter_;
  return mix(key_ + counter_ * kGolden);
}

double Rng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) noexcept {
  return lo + (hi - lo) * uniform();
}

std::size_t Rng::below(std::size_t n) noexcept {
  const auto bound = static_cast<std::uint64_t>(n);
  // Reject the top partial bucket.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  std::uint64_t r = next_u64();
  while (r > limit) r = next_u64();
  return static_cast<std::size_t>(r % bound);
}

double Rng::gaussian() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace eegart
