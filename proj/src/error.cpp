#include "scalemix/error.hpp"

namespace scalemix {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotDecomposable: return "NotDecomposable";
    case ErrorCode::NoLegalMove: return "NoLegalMove";
    case ErrorCode::IllegalMovePair: return "IllegalMovePair";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::NonPositiveScale: return "NonPositiveScale";
    case ErrorCode::NonPdScale: return "NonPdScale";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotDiagonallyDominant: return "NotDiagonallyDominant";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptySampleSet: return "EmptySampleSet";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConstantColumn: return "ConstantColumn";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace scalemix
