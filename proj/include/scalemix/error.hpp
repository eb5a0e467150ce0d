#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scalemix {

enum class ErrorCode {
  NotDecomposable,
  NoLegalMove,
  IllegalMovePair,
  InvalidParams,
  NonPositiveInput,
  NonPositiveScale,
  NonPdScale,
  IllConditioned,
  NotPositiveDefinite,
  NotDiagonallyDominant,
  DimensionMismatch,
  EmptySampleSet,
  TooFewSamples,
  ParseError,
  ConstantColumn,
  SchemaMismatch,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-readable code so the
// CLI can emit a structured error report.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace scalemix
