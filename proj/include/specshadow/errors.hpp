#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace specshadow {

/// Root of the library's error hierarchy.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An input file or document violates its schema (malformed JSON, wrong
/// shapes, values out of range, unknown keys).
struct SchemaError : Error {
    using Error::Error;
};

/// Config values are unusable (non-positive tolerance, degenerate grid).
struct ConfigError : SchemaError {
    using SchemaError::SchemaError;
};

/// A spectrum violates the distinctness hypothesis the machinery relies on.
struct HypothesisViolation : Error {
    using Error::Error;
};

/// A partial automorphism was applied outside its domain of definition.
/// factor_index is the failing factor in application order (rightmost factor
/// of the word is index 0), or -1 when not applicable.
struct DomainViolation : Error {
    explicit DomainViolation(const std::string& what, std::ptrdiff_t factor = -1)
        : Error(what), factor_index(factor) {}
    std::ptrdiff_t factor_index;
};

/// An operation that needs lambda != 0 was called at lambda = 0.
struct LambdaZero : Error {
    using Error::Error;
};

/// Two slots tie in both level and eigenvalue, so no deterministic order exists.
struct OrderingAmbiguous : Error {
    using Error::Error;
};

/// No level choice avoids collisions for the requested ball radius.
struct InfeasibleBall : Error {
    using Error::Error;
};

/// A covering with the required separation could not be built at this resolution.
struct CoverFailure : Error {
    using Error::Error;
};

/// A traced path passes too close to a collision point.
struct PathThroughWall : Error {
    PathThroughWall(const std::string& what, std::complex<double> pt)
        : Error(what), point(pt) {}
    std::complex<double> point;
};

/// A slot pair has identical eigenvalue families, so its collision locus is
/// all of the punctured line (distinctness hypothesis violated).
struct DegenerateFamily : Error {
    using Error::Error;
};

/// A weight table contains a negative weight where none is allowed.
struct NegativeWeight : Error {
    using Error::Error;
};

/// A flag fails the invariance required of it.
struct FlagNotInvariant : Error {
    using Error::Error;
};

}  // namespace specshadow
