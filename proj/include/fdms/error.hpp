#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fdms {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    OutOfRange,
    DuplicateJoint,
    EmptyFinger,
    InvalidLimits,
    InvalidModel,
    InsufficientData,
    NonFiniteData,
    NonConvergence,
    NegativeEigenvalue,
    DegenerateVariance,
    InvalidSymbol,
    NonCanonical,
    MultiGroup,
    EmptyAssignment,
    DuplicateName,
    NotFound,
    CorruptFile,
    ParseError,
    StreamExhausted,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DuplicateJoint: return "DuplicateJoint";
    case ErrorCode::EmptyFinger: return "EmptyFinger";
    case ErrorCode::InvalidLimits: return "InvalidLimits";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NonFiniteData: return "NonFiniteData";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::NegativeEigenvalue: return "NegativeEigenvalue";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::InvalidSymbol: return "InvalidSymbol";
    case ErrorCode::NonCanonical: return "NonCanonical";
    case ErrorCode::MultiGroup: return "MultiGroup";
    case ErrorCode::EmptyAssignment: return "EmptyAssignment";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::StreamExhausted: return "StreamExhausted";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library. The code is stable and machine-readable;
/// the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message)
{
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message)
{
    if (!condition)
        fail(code, message);
}

} // namespace fdms
