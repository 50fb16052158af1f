#ifndef FOURFOLD_ERRORS_HPP
#define FOURFOLD_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace fourfold {

enum class ErrorCode {
    UnknownGenerator,
    NonIntegralDimension,
    UnsupportedMultiplicity,
    NucleusConsumed,
    SymplecticRequired,
    NoRewrite,
    InvalidIndex,
    NoStableContraction,
    RecursionObstructed,
    IncompatibleFamilies,
    NotAnIsometry,
    DimensionMismatch,
    NotTransverse,
    NotACycle,
    Precondition,
    ParseError,
    IoError,
};

inline std::string_view error_code_name(ErrorCode c)
{
    switch (c) {
        case ErrorCode::UnknownGenerator: return "UnknownGenerator";
        case ErrorCode::NonIntegralDimension: return "NonIntegralDimension";
        case ErrorCode::UnsupportedMultiplicity: return "UnsupportedMultiplicity";
        case ErrorCode::NucleusConsumed: return "NucleusConsumed";
        case ErrorCode::SymplecticRequired: return "SymplecticRequired";
        case ErrorCode::NoRewrite: return "NoRewrite";
        case ErrorCode::InvalidIndex: return "InvalidIndex";
        case ErrorCode::NoStableContraction: return "NoStableContraction";
        case ErrorCode::RecursionObstructed: return "RecursionObstructed";
        case ErrorCode::IncompatibleFamilies: return "IncompatibleFamilies";
        case ErrorCode::NotAnIsometry: return "NotAnIsometry";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotTransverse: return "NotTransverse";
        case ErrorCode::NotACycle: return "NotACycle";
        case ErrorCode::Precondition: return "Precondition";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Engine-level error carrying a stable machine-readable code.
class EngineError : public std::runtime_error {
public:
    EngineError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what)
{
    throw EngineError(code, what);
}

} // namespace fourfold

#endif
