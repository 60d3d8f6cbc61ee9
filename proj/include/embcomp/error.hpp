#pragma once

#include <stdexcept>
#include <string>

namespace embcomp {

// Base for all library errors. The CLI maps each subclass onto an exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input, shape mismatch, bad parameter. Exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Container or text-format violation (bad magic, truncation, bad line).
class FormatError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Filesystem failure. Exit code 1.
class IoError : public Error {
public:
    using Error::Error;
};

// No configuration fits the requested memory budget. Exit code 4.
class InfeasibleBudget : public Error {
public:
    using Error::Error;
};

}  // namespace embcomp
