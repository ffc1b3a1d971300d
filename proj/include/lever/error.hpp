#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lever {

enum class ErrorCode {
    AllZeroMatrix,
    NonFiniteEntry,
    MalformedInput,
    DimensionMismatch,
    NegativeLambda,
    Eps0OutOfRange,
    EpsOutOfRange,
    AllZeroScores,
    NotOrthonormal,
    ZeroNormInput,
    SketchRankCollapse,
    NonPositiveDimension,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::AllZeroMatrix: return "AllZeroMatrix";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeLambda: return "NegativeLambda";
    case ErrorCode::Eps0OutOfRange: return "Eps0OutOfRange";
    case ErrorCode::EpsOutOfRange: return "EpsOutOfRange";
    case ErrorCode::AllZeroScores: return "AllZeroScores";
    case ErrorCode::NotOrthonormal: return "NotOrthonormal";
    case ErrorCode::ZeroNormInput: return "ZeroNormInput";
    case ErrorCode::SketchRankCollapse: return "SketchRankCollapse";
    case ErrorCode::NonPositiveDimension: return "NonPositiveDimension";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

} // namespace lever
