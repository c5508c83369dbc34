#pragma once

#include <stdexcept>
#include <string>

namespace psd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration (bad gates, unknown method id, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data violating an operation's precondition (ragged CSV, gate out of
/// bounds, zero denominator, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown: singular systems, diverging training.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace psd
