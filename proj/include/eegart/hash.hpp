#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace eegart {

/// 64-bit FNV-1a (offset 0xcbf29ce484222325, prime 0x100000001b3).
class Fnv1a {
 public:
  void update(std::string_view bytes) noexcept;
  std::uint64_t digest() const noexcept { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string fnv1a_hex(std::string_view bytes);
/// Hash of a file's bytes; throws IoError.
std::string file_hash(const std::filesystem::path& path);

}  // namespace eegart
