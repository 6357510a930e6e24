#pragma once

#include <stdexcept>
#include <string>

namespace algossip {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or invalid run configuration. `field` names the offending key
/// when one is known.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message, std::string field = {})
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Random geometric graph could not be made connected within the retry budget.
class ConnectivityFailure : public Error {
 public:
  using Error::Error;
};

/// Operation not defined for this penalty schedule kind.
class KindError : public Error {
 public:
  using Error::Error;
};

/// Runs that are supposed to share an instance do not.
class MismatchError : public Error {
 public:
  using Error::Error;
};

/// A run produced non-finite values.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace algossip
