#pragma once

#include <stdexcept>
#include <string>

namespace lpvar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid construction parameters (grid size, catalog strings, budgets).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A request finer than what the grid or the cascade tables can resolve.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// Overflow/underflow or a root bracket that could not be established.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Inputs outside the admissible domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace lpvar
