#include "svcal/error.hpp"

namespace svcal {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoVotePattern: return "NoVotePattern";
    case ErrorCode::InconsistentVoteSum: return "InconsistentVoteSum";
    case ErrorCode::UnknownFormation: return "UnknownFormation";
    case ErrorCode::UnparsableNumeral: return "UnparsableNumeral";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MissingHumanLabel: return "MissingHumanLabel";
    case ErrorCode::InvalidTemperature: return "InvalidTemperature";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::DegenerateGroup: return "DegenerateGroup";
    case ErrorCode::MisalignedKeys: return "MisalignedKeys";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnsupportedArticle: return "UnsupportedArticle";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace svcal
