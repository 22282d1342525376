#pragma once

#include <stdexcept>
#include <string>

namespace ctqt {

// Base class for everything this library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// finite field
struct NotPrime : Error { using Error::Error; };
struct DivisionByZero : Error { using Error::Error; };
struct ModulusMismatch : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct NoUniqueSolution : Error { using Error::Error; };
struct Inconsistent : Error { using Error::Error; };
struct DuplicatePoints : Error { using Error::Error; };
struct BadDimensions : Error { using Error::Error; };

// threshold sharing
struct InsufficientShares : Error { using Error::Error; };
struct InconsistentShares : Error { using Error::Error; };
struct EnumerationTooLarge : Error { using Error::Error; };

// simulator
struct BadDimension : Error { using Error::Error; };
struct NonUnitary : Error { using Error::Error; };
struct SiteCollision : Error { using Error::Error; };
struct NotQubit : Error { using Error::Error; };
struct BasisDimensionMismatch : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct CapExceeded : Error { using Error::Error; };

// protocol engine
struct InvalidScheme : Error { using Error::Error; };
struct ProtocolOrderViolation : Error { using Error::Error; };
struct WrongScheme : Error { using Error::Error; };

// configuration / CLI
struct ValidationError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

}  // namespace ctqt
