#pragma once

#include <stdexcept>
#include <string>

namespace qbat {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotHermitian : Error { using Error::Error; };
struct InvalidState : Error { using Error::Error; };
struct NegativeEigenvalue : Error { using Error::Error; };
struct SingularReference : Error { using Error::Error; };
struct NumericalDomain : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct NotAState : Error { using Error::Error; };
struct RateSingular : Error { using Error::Error; };
struct StepSizeTooCoarse : Error { using Error::Error; };
struct GridDegenerate : Error { using Error::Error; };
struct GridTooShort : Error { using Error::Error; };
struct ZeroGenerator : Error { using Error::Error; };
struct FloorTooSmall : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct UsageError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace qbat
