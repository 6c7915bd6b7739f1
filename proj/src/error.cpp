#include "regscale/error.hpp"

namespace regscale {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::DuplicateSample: return "DuplicateSample";
    case ErrorCode::InvalidSample: return "InvalidSample";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateGrid: return "DegenerateGrid";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::DegenerateDesign: return "DegenerateDesign";
    case ErrorCode::ZeroMedian: return "ZeroMedian";
    case ErrorCode::NoSamples: return "NoSamples";
    case ErrorCode::FallbackExhausted: return "FallbackExhausted";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::TooManyRequested: return "TooManyRequested";
    case ErrorCode::UnknownFormat: return "UnknownFormat";
    case ErrorCode::CorruptHeader: return "CorruptHeader";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateGrid:
    case ErrorCode::InsufficientSamples:
    case ErrorCode::DegenerateDesign:
    case ErrorCode::ZeroMedian:
    case ErrorCode::FallbackExhausted:
      return true;
    default:
      return false;
  }
}

}  // namespace regscale
