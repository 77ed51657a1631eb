#pragma once

#include <stdexcept>
#include <string>

namespace siac {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data/configuration.
class InvalidInput : public Error {
public:
  using Error::Error;
};

/// Evaluation point outside the domain of a non-periodic object.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Coefficient system singular or too ill-conditioned to trust.
class DegenerateKernel : public Error {
public:
  using Error::Error;
};

/// A request that is well-formed but outside what the method supports.
class UnsupportedConfiguration : public Error {
public:
  using Error::Error;
};

} // namespace siac
