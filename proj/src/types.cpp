#include "eegart/types.hpp"

#include "eegart/error.hpp"

namespace eegart {

std::string_view to_string(SegmentLabel label) {
  switch (label) {
    case SegmentLabel::Clean: return "Clean";
    case SegmentLabel::EOG: return "EOG";
    case SegmentLabel::EMG: return "EMG";
  }
  return "?";
}

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::EOG: return "EOG";
    case NoiseKind::EMG: return "EMG";
    case NoiseKind::White: return "White";
  }
  return "?";
}

std::string_view to_string(SetKind kind) {
  switch (kind) {
    case SetKind::CleanEEG: return "CleanEEG";
    case SetKind::EOG: return "EOG";
    case SetKind::EMG: return "EMG";
  }
  return "?";
}

std::string_view to_string(Task task) {
  return task == Task::Binary ? "binary" : "ternary";
}

Task parse_task(std::string_view text) {
  if (text == "binary") return Task::Binary;
  if (text == "ternary") return Task::Ternary;
  fail(ErrorCode::ConfigError, "task must be 'binary' or 'ternary', got '" + std::string(text) + "'");
}

SegmentLabel label_for(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::EOG: return SegmentLabel::EOG;
    case NoiseKind::EMG: return SegmentLabel::EMG;
    case NoiseKind::White: break;
  }
  fail(ErrorCode::BadLabel, "white noise has no class label");
}

}  // namespace eegart
