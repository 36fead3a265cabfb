#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fitsim {

// Base class for all errors raised by the library. Subclasses mirror the
// failure modes of the pipeline so callers can react per kind.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input text; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// A constructed value violates a type invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Negative token count in a count series.
class NegativeCount : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Not enough occupied years, bins or points to proceed.
class InsufficientData : public Error {
public:
    using Error::Error;
};

// A bin with zero tokens on both sides; smoothing is undefined.
class DegenerateBin : public Error {
public:
    using Error::Error;
};

// All sample values identical; the normality statistic is undefined.
class DegenerateSample : public Error {
public:
    using Error::Error;
};

// All rescaled increments identical; the t statistic is undefined.
class DegenerateIncrements : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

// Requested bin count incompatible with the series length.
class InvalidBinning : public Error {
public:
    using Error::Error;
};

// Two consecutive points share a time coordinate.
class ZeroTimeStep : public Error {
public:
    using Error::Error;
};

// Filesystem/stream failure.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace fitsim
