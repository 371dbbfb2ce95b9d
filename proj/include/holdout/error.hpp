#pragma once

#include <stdexcept>
#include <string>

namespace holdout {

// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Malformed, missing or inconsistent input data.
class DataError : public Error {
public:
    using Error::Error;
};

// Invalid run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Requested accuracy (or class constraint) cannot be met on the grid.
class InfeasibleTarget : public Error {
public:
    using Error::Error;
};

// Both class densities vanish at the queried point.
class UnsupportedPoint : public Error {
public:
    using Error::Error;
};

// Classified region carries zero probability mass.
class EmptyRegion : public Error {
public:
    using Error::Error;
};

// Point-swap derivative evaluated with Z(r') == X.
class SingularSwap : public Error {
public:
    using Error::Error;
};

}  // namespace holdout
