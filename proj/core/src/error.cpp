#include "gliomics/error.hpp"

namespace gliomics {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedDatatype: return "UnsupportedDatatype";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::GeometryMismatch: return "GeometryMismatch";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::NoImprovement: return "NoImprovement";
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::DegenerateRegion: return "DegenerateRegion";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewGroups: return "TooFewGroups";
    case ErrorCode::InfeasibleRatios: return "InfeasibleRatios";
    case ErrorCode::RunFailed: return "RunFailed";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace gliomics
