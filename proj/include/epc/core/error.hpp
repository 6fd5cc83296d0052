#pragma once

#include <stdexcept>
#include <string>

namespace epc {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller supplied something that violates an operation's precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Input data could not be parsed or is internally inconsistent.
class DataError : public Error {
public:
    using Error::Error;
};

// A configuration document or flag is invalid.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace epc
