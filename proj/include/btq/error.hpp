#pragma once

#include <stdexcept>
#include <string>

namespace btq {

enum class ErrorKind {
    InvalidArgument,
    Config,
    SingularMatrix,
    PrecisionExceeded,
    NotASubset,
    VertexNotInSimplex,
    InfiniteComplex,
    CoreUnavailable,
    SupportExceedsCore,
    NonFiniteFiber,
    MissingRamificationData,
    NotSmall,
    SingularBasis,
    WrongDimension,
    AutGroupTooLarge,
    EnumerationCeiling,
    NotInSupport,
    LevelsIncompatible,
    CollarCheckFailed,
    NotStabilized,
    GeneratorCeiling,
    BadSimplexPoint,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::PrecisionExceeded: return "PrecisionExceeded";
    case ErrorKind::NotASubset: return "NotASubset";
    case ErrorKind::VertexNotInSimplex: return "VertexNotInSimplex";
    case ErrorKind::InfiniteComplex: return "InfiniteComplex";
    case ErrorKind::CoreUnavailable: return "CoreUnavailable";
    case ErrorKind::SupportExceedsCore: return "SupportExceedsCore";
    case ErrorKind::NonFiniteFiber: return "NonFiniteFiber";
    case ErrorKind::MissingRamificationData: return "MissingRamificationData";
    case ErrorKind::NotSmall: return "NotSmall";
    case ErrorKind::SingularBasis: return "SingularBasis";
    case ErrorKind::WrongDimension: return "WrongDimension";
    case ErrorKind::AutGroupTooLarge: return "AutGroupTooLarge";
    case ErrorKind::EnumerationCeiling: return "EnumerationCeiling";
    case ErrorKind::NotInSupport: return "NotInSupport";
    case ErrorKind::LevelsIncompatible: return "LevelsIncompatible";
    case ErrorKind::CollarCheckFailed: return "CollarCheckFailed";
    case ErrorKind::NotStabilized: return "NotStabilized";
    case ErrorKind::GeneratorCeiling: return "GeneratorCeiling";
    case ErrorKind::BadSimplexPoint: return "BadSimplexPoint";
    }
    return "Unknown";
}

/// Ceiling errors map to CLI exit code 3, everything else to 2.
inline bool is_ceiling(ErrorKind k) {
    return k == ErrorKind::AutGroupTooLarge || k == ErrorKind::EnumerationCeiling ||
           k == ErrorKind::PrecisionExceeded || k == ErrorKind::GeneratorCeiling;
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond)
        throw Error(kind, what);
}

} // namespace btq
