#pragma once

#include <stdexcept>
#include <string>

namespace classpulse {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input shape is unusable (empty roster, misaligned rows, n = 0, ...).
class StructuralError : public Error {
public:
    using Error::Error;
};

/// An id could not be resolved against the activity.
class LookupError : public Error {
public:
    using Error::Error;
};

/// An event or configuration value failed validation.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Every feature column has zero range, so no dissimilarity can be formed.
class DegenerateFeaturesError : public Error {
public:
    using Error::Error;
};

class InsufficientObservationsError : public Error {
public:
    using Error::Error;
};

class InvalidKError : public Error {
public:
    using Error::Error;
};

class InvalidBinWidthError : public Error {
public:
    using Error::Error;
};

/// A mapped column is missing from the header of an input file.
class SchemaError : public Error {
public:
    SchemaError(const std::string& column)
        : Error("missing column '" + column + "'"), column_(column) {}

    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

}  // namespace classpulse
