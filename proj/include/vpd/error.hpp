#pragma once

#include <stdexcept>
#include <string>

namespace vpd {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File missing, unreadable or unwritable.
struct IoError : Error {
    using Error::Error;
};

/// Recognized file but unsupported encoding or malformed contents.
struct FormatError : Error {
    using Error::Error;
};

/// Input buffer dimensions disagree with the configured grid.
struct DimensionMismatch : Error {
    using Error::Error;
};

struct IndexOutOfRange : Error {
    using Error::Error;
};

/// Two pipeline stages were configured with incompatible parameters.
struct ParamsMismatch : Error {
    using Error::Error;
};

/// Cache file is valid but was built for a different configuration.
struct CacheMismatch : Error {
    using Error::Error;
};

/// Cache file fails magic/version/checksum validation.
struct CorruptCache : Error {
    using Error::Error;
};

struct DegenerateLine : Error {
    using Error::Error;
};

struct DegenerateFamily : Error {
    using Error::Error;
};

struct InsufficientCandidates : Error {
    using Error::Error;
};

/// The filtered Hough grid carries no votes; nothing to detect.
struct NoEvidence : Error {
    using Error::Error;
};

/// Manifest parse failure; message carries line/field diagnostics.
struct ManifestError : Error {
    using Error::Error;
};

/// Scene specification cannot be realized (after bounded retries).
struct InfeasibleSpec : Error {
    using Error::Error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

}  // namespace vpd
