#pragma once

#include <stdexcept>
#include <string>

namespace ucr {

/// Base for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed document (not valid JSON, or not the expected text shape).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Well-formed document whose structure does not match the expected schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Structurally valid input that violates a domain invariant
/// (dangling reference, out-of-range value, duplicate, cap exceeded).
class SemanticError : public Error {
public:
    using Error::Error;
};

/// Two inputs that must share a shape do not.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// The LP engine could not make progress even after anti-cycling recovery.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace ucr
