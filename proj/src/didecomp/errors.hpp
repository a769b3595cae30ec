#pragma once

#include <stdexcept>
#include <string>

namespace didecomp {

/// Broad failure classes. They map one-to-one onto the C API status codes
/// and the CLI exit codes (config 2, data 3, numerical 4).
enum class ErrorKind {
    Config,
    Data,
    Numerical,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

// ---------------------------------------------------------------------------
// Data errors
// ---------------------------------------------------------------------------

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

/// A value outside the domain of a transform (e.g. ln of a non-positive level).
class DomainError : public DataError {
public:
    using DataError::DataError;
};

class InsufficientDataError : public DataError {
public:
    using DataError::DataError;
};

/// Column/name mismatch between what an operation expects and what it got.
class SchemaError : public DataError {
public:
    using DataError::DataError;
};

class ParseError : public DataError {
public:
    using DataError::DataError;
};

class FetchError : public DataError {
public:
    FetchError(const std::string& what, std::string url, int status)
        : DataError(what), url_(std::move(url)), status_(status) {}
    [[nodiscard]] const std::string& url() const noexcept { return url_; }
    /// HTTP status of the last attempt, or -1 when no response was received.
    [[nodiscard]] int status() const noexcept { return status_; }

private:
    std::string url_;
    int status_;
};

// ---------------------------------------------------------------------------
// Numerical errors
// ---------------------------------------------------------------------------

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

/// Zero-variance column or target.
class DegenerateError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularDesignError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace didecomp
