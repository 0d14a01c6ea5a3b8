#pragma once

#include <stdexcept>
#include <string>

namespace ocsp {

// Base class for all library errors. CLI maps these to exit code 1,
// property-verification failures to exit code 2.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input violates a schema or a documented precondition.
struct SchemaError : Error {
    using Error::Error;
};

// A parameter is outside its documented range.
struct BadParameter : Error {
    using Error::Error;
};

// Tuple length does not match predicate arity.
struct ArityMismatch : Error {
    using Error::Error;
};

// natural_order_permutation got repeated entries.
struct DuplicateEntries : Error {
    using Error::Error;
};

// An ordering is missing a rank for a constrained variable.
struct UnrankedVariable : Error {
    using Error::Error;
};

// Exhaustive enumeration would exceed the configured cap.
struct TooLarge : Error {
    using Error::Error;
};

// Bucket count does not divide the table size (decoding stage).
struct BucketSizeMismatch : Error {
    using Error::Error;
};

// Bucket count does not divide the domain size (bucketing stage).
struct DivisibilityError : Error {
    using Error::Error;
};

// Two objects that must share a domain or alphabet do not.
struct DomainMismatch : Error {
    using Error::Error;
};

// A coordinate index is outside the function's dimension.
struct IndexOutOfRange : Error {
    using Error::Error;
};

// An indicator's mean is not the exact value the bound requires.
struct MeanMismatch : Error {
    using Error::Error;
};

// Conditional sampling hit a zero-mass prefix.
struct ConditioningFailure : Error {
    using Error::Error;
};

// Gadget compilation requires width-3 NBTW constraints only.
struct NotNbtw : Error {
    using Error::Error;
};

}  // namespace ocsp
