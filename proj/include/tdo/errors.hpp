#pragma once

#include <stdexcept>
#include <string>

namespace tdo {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad arguments / incompatible command usage. CLI exit code 1.
struct UsageError : Error {
    using Error::Error;
};

// A model invariant does not hold (FIFO violation, failed sandwich check,
// parameter outside its admissible window, ...). CLI exit code 2.
struct InvariantError : Error {
    using Error::Error;
};

// File system and serialization problems. CLI exit code 3.
struct IoError : Error {
    using Error::Error;
};

// Malformed input file; message carries the line number.
struct ParseError : IoError {
    using IoError::IoError;
};

// Query for an unreachable destination.
struct NoPathError : Error {
    using Error::Error;
};

} // namespace tdo
