#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace permfwer {

// Error categories; the CLI maps each to a distinct exit code.
enum class ErrorKind {
    Parse,       // malformed or inconsistent input files
    Fit,         // null-model fitting failures
    Resampling,  // replicate generation and cutoff estimation
    Config,      // invalid configuration or argument combinations
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ParseError : public Error {
public:
    // row and column are 1-based data coordinates; 0 means "not applicable".
    ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
        : Error(ErrorKind::Parse, what), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

class SingularDesignError : public Error {
public:
    explicit SingularDesignError(const std::string& what) : Error(ErrorKind::Fit, what) {}
};

class QuasiSeparationError : public Error {
public:
    explicit QuasiSeparationError(const std::string& what) : Error(ErrorKind::Fit, what) {}
};

class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what) : Error(ErrorKind::Fit, what) {}
};

class NumericalDegeneracyError : public Error {
public:
    explicit NumericalDegeneracyError(const std::string& what) : Error(ErrorKind::Fit, what) {}
};

class DegenerateMarkerError : public Error {
public:
    DegenerateMarkerError(const std::string& what, std::size_t marker)
        : Error(ErrorKind::Fit, what), marker_(marker) {}

    // 0-based marker column.
    std::size_t marker() const noexcept { return marker_; }

private:
    std::size_t marker_;
};

class SizeError : public Error {
public:
    explicit SizeError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class InsufficientReplicatesError : public Error {
public:
    explicit InsufficientReplicatesError(const std::string& what)
        : Error(ErrorKind::Resampling, what) {}
};

class InvalidCorrelationError : public Error {
public:
    explicit InvalidCorrelationError(const std::string& what) : Error(ErrorKind::Resampling, what) {}
};

class ReplicateError : public Error {
public:
    ReplicateError(const std::string& what, std::size_t replicate)
        : Error(ErrorKind::Resampling, what), replicate_(replicate) {}

    std::size_t replicate() const noexcept { return replicate_; }

private:
    std::size_t replicate_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

}  // namespace permfwer
