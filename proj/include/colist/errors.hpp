#pragma once

#include <stdexcept>
#include <string>

namespace colist {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A file could not be opened or read.
struct IoError : Error {
    using Error::Error;
};

/// Malformed file content; the message names the offending line.
struct ParseError : Error {
    using Error::Error;
};

/// Content parsed but violates a semantic invariant (bad rating, duplicate id, ...).
struct ValidationError : Error {
    using Error::Error;
};

/// A caller violated an operation's precondition.
struct ContractError : Error {
    using Error::Error;
};

/// An id was looked up that does not exist.
struct LookupError : Error {
    using Error::Error;
};

}  // namespace colist
