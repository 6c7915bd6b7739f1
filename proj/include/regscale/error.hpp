#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace regscale {

enum class ErrorCode {
  OutOfBounds,
  DuplicateSample,
  InvalidSample,
  DimensionMismatch,
  DegenerateGrid,
  InsufficientSamples,
  DegenerateDesign,
  ZeroMedian,
  NoSamples,
  FallbackExhausted,
  NoOverlap,
  InvalidSpec,
  TooManyRequested,
  UnknownFormat,
  CorruptHeader,
  DimensionOverflow,
  ParseError,
  Io,
};

std::string_view to_string(ErrorCode code);

// Numerical failures (as opposed to bad input) map to a distinct CLI exit code.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the code prefix, for rethrowing with more context.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace regscale
