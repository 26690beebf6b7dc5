#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eegart {

inline constexpr std::size_t kSegmentLength = 512;
inline constexpr double kSampleRate = 256.0;

/// Ternary class index. The binary view maps Clean -> 0 and both artifact
/// kinds -> 1.
enum class SegmentLabel : int { Clean = 0, EOG = 1, EMG = 2 };

enum class NoiseKind { EOG, EMG, White };

enum class SetKind { CleanEEG, EOG, EMG };

enum class Task { Binary, Ternary };

std::string_view to_string(SegmentLabel label);
std::string_view to_string(NoiseKind kind);
std::string_view to_string(SetKind kind);
std::string_view to_string(Task task);
Task parse_task(std::string_view text);

inline int class_count(Task task) { return task == Task::Binary ? 2 : 3; }

/// Class index of a ternary label under the given task.
inline int class_index(SegmentLabel label, Task task) {
  const int ternary = static_cast<int>(label);
  return task == Task::Binary ? (ternary == 0 ? 0 : 1) : ternary;
}

SegmentLabel label_for(NoiseKind kind);

struct Segment {
  std::vector<double> samples;
  SegmentLabel label = SegmentLabel::Clean;
};

/// Row-major N x 512 matrix of segments loaded from one file.
struct SegmentSet {
  SetKind kind = SetKind::CleanEEG;
  std::string source_path;
  std::size_t rows = 0;
  std::vector<double> data;

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * kSegmentLength, kSegmentLength};
  }
  std::size_t size() const { return rows; }
};

}  // namespace eegart
