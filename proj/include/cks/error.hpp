#pragma once

#include <stdexcept>
#include <string>

namespace cks {

enum class ErrorCode {
    ParseError,
    DimensionMismatch,
    UnboundedRegion,
    EmptyRegion,
    DegenerateInput,
    NotReflexive,
    DecompositionMismatch,
    RankMismatch,
    ConeLookupFailure,
    IndexOutOfRange,
    NonIntegralScaling,
    ZeroIdeal,
    UnboundedWeights,
    MissingCharacter,
    NotMultiplicative,
    NotIntegerValued,
    GridMismatch,
    EmptyDecomposition,
    UnsupportedDescriptor,
    OptimizationInfeasible,
    Unbounded,
    DenominatorVanishes,
    RankTooHigh,
    DegenerateSubtorus,
    SuiteFailure,
    ValidationError,
    IoError,
    Internal,
};

inline const char* code_name(ErrorCode c)
{
    switch (c) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnboundedRegion: return "UnboundedRegion";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NotReflexive: return "NotReflexive";
    case ErrorCode::DecompositionMismatch: return "DecompositionMismatch";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::ConeLookupFailure: return "ConeLookupFailure";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonIntegralScaling: return "NonIntegralScaling";
    case ErrorCode::ZeroIdeal: return "ZeroIdeal";
    case ErrorCode::UnboundedWeights: return "UnboundedWeights";
    case ErrorCode::MissingCharacter: return "MissingCharacter";
    case ErrorCode::NotMultiplicative: return "NotMultiplicative";
    case ErrorCode::NotIntegerValued: return "NotIntegerValued";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::EmptyDecomposition: return "EmptyDecomposition";
    case ErrorCode::UnsupportedDescriptor: return "UnsupportedDescriptor";
    case ErrorCode::OptimizationInfeasible: return "OptimizationInfeasible";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::DenominatorVanishes: return "DenominatorVanishes";
    case ErrorCode::RankTooHigh: return "RankTooHigh";
    case ErrorCode::DegenerateSubtorus: return "DegenerateSubtorus";
    case ErrorCode::SuiteFailure: return "SuiteFailure";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

/// Every failure in the library carries a stable code; the CLI maps codes to exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(code_name(code)) + ": " + what), code_(code)
    {
    }
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace cks
