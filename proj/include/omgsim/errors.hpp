#pragma once

#include <stdexcept>
#include <string>

namespace omgsim {

// Base class for every error raised by the library. Warnings (truncation,
// convergence, clamping) are not exceptions; they are collected into the
// `warnings` member of the returned result instead.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error {
  public:
    using Error::Error;
};

class TruncationError : public Error {
  public:
    using Error::Error;
};

class DimensionMismatch : public Error {
  public:
    using Error::Error;
};

class NonHermitianError : public Error {
  public:
    using Error::Error;
};

class FitError : public Error {
  public:
    using Error::Error;
};

class IncompleteDataError : public Error {
  public:
    using Error::Error;
};

class EmptyDataError : public Error {
  public:
    using Error::Error;
};

class EmptyCategoryError : public Error {
  public:
    using Error::Error;
};

class MissingExposureError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace omgsim
