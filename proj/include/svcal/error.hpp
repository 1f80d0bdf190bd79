#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace svcal {

enum class ErrorCode {
  NoVotePattern,
  InconsistentVoteSum,
  UnknownFormation,
  UnparsableNumeral,
  EmptyInput,
  MissingHumanLabel,
  InvalidTemperature,
  InvalidGrid,
  InvalidProbability,
  DegenerateGroup,
  MisalignedKeys,
  ZeroVariance,
  DimensionMismatch,
  Diverged,
  SchemaError,
  DuplicateKey,
  InvalidArgument,
  UnsupportedArticle,
  IoError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; the code tells the
// CLI whether it is a validation (exit 1) or I/O (exit 2) failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace svcal
