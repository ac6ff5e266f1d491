#pragma once

#include <stdexcept>
#include <string>

namespace latentrank {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A distribution or sampler parameter is outside its admissible range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A truncation interval with lower >= upper (or NaN bounds).
class InvalidInterval : public Error {
 public:
  using Error::Error;
};

/// A function argument lies outside the function's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Observations are unusable (NaN, empty, mismatched lengths).
class InvalidData : public Error {
 public:
  using Error::Error;
};

/// A statistic is undefined for the supplied data (e.g. constant margin).
class UndefinedStatistic : public Error {
 public:
  using Error::Error;
};

/// Too few posterior draws for the requested estimator.
class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

/// The data set is too small for the requested sampler.
class SampleTooSmall : public Error {
 public:
  using Error::Error;
};

/// A simulation or copula configuration cannot be realised.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

}  // namespace latentrank
