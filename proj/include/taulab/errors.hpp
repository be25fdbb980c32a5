#pragma once

#include <stdexcept>
#include <string>

namespace taulab {

// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller-supplied argument violates an operation's precondition.
struct ValidationError : Error {
    using Error::Error;
};

// An exhaustive operation was asked to run beyond its desk-scale guard.
struct GuardError : Error {
    using Error::Error;
};

// A rejection-sampling loop hit its attempt cap.
struct SamplingExhaustedError : Error {
    using Error::Error;
};

// Malformed or truncated input document.
struct ParseError : Error {
    using Error::Error;
};

// Document carries a format version this build does not understand.
struct VersionMismatchError : ParseError {
    using ParseError::ParseError;
};

// A structural invariant of a value does not hold; the message names it.
struct InvariantViolation : Error {
    using Error::Error;
};

}  // namespace taulab
