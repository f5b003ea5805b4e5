#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dioph {

// Base of every library error. The exit-code mapping in the CLI keys off the
// concrete subclass.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precision-class failures: the caller may retry at a higher mantissa width.
class PrecisionError : public Error {
public:
    using Error::Error;
};

class Indeterminate : public PrecisionError {
public:
    using PrecisionError::PrecisionError;
};

// An interval that should have excluded zero did not.
class ZeroNotExcluded : public Indeterminate {
public:
    using Indeterminate::Indeterminate;
};

class AmbiguousRounding : public PrecisionError {
public:
    using PrecisionError::PrecisionError;
};

class PrecisionExhausted : public PrecisionError {
public:
    using PrecisionError::PrecisionError;
};

class PrecisionOverflow : public PrecisionError {
public:
    using PrecisionError::PrecisionError;
};

class DegenerateForm : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    BudgetExceeded(const std::string& what, std::uint64_t evaluations)
        : Error(what), evaluations_(evaluations) {}
    std::uint64_t evaluations() const noexcept { return evaluations_; }

private:
    std::uint64_t evaluations_;
};

class InsufficientQuotients : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class SearchExhausted : public Error {
public:
    using Error::Error;
};

class TooShort : public Error {
public:
    using Error::Error;
};

class NoQualifyingBox : public Error {
public:
    NoQualifyingBox(const std::string& what, std::size_t index)
        : Error(what), index_(index) {}
    std::size_t failing_index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class InvalidManifest : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace dioph
