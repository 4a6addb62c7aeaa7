#pragma once

#include <stdexcept>
#include <string>

namespace mgqda {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed arguments: non-finite values, dimension mismatches, bad ranges.
class InvalidInput : public Error
{
public:
    using Error::Error;
};

/// A matrix expected to be positive semidefinite has a clearly negative eigenvalue.
class NotPSD : public Error
{
public:
    using Error::Error;
};

/// Some group has fewer than two observations.
class InsufficientGroupSize : public Error
{
public:
    using Error::Error;
};

/// A simulation covariance family produced an invalid matrix.
class ConstructionError : public Error
{
public:
    using Error::Error;
};

} // namespace mgqda
