#include "eegart/error.hpp"

namespace eegart {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedDtype: return "UnsupportedDtype";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::EmptySignal: return "EmptySignal";
    case ErrorCode::DegenerateSignal: return "DegenerateSignal";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SameKind: return "SameKind";
    case ErrorCode::ConstantSignal: return "ConstantSignal";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InsufficientNoiseSegments: return "InsufficientNoiseSegments";
    case ErrorCode::InvalidCutoff: return "InvalidCutoff";
    case ErrorCode::NotDivisible: return "NotDivisible";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::BadLabel: return "BadLabel";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::LeakageError: return "LeakageError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace eegart
