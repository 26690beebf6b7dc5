#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eegart {

enum class ErrorCode {
  BadMagic,
  UnsupportedDtype,
  ShapeError,
  EmptySignal,
  DegenerateSignal,
  LengthMismatch,
  SameKind,
  ConstantSignal,
  InsufficientData,
  InsufficientNoiseSegments,
  InvalidCutoff,
  NotDivisible,
  ConfigError,
  TooFewRows,
  RankDeficient,
  BadLabel,
  ShapeMismatch,
  EmptySplit,
  DimMismatch,
  LeakageError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (and the CLI exit-code mapping) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace eegart
