#pragma once

#include <stdexcept>
#include <string>

namespace alrl {

/// Raised when a caller passes a value outside an operation's contract.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an object is asked to do something its current state forbids,
/// e.g. stepping a learner that already reached mastery.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when a score is mathematically undefined (zero variance in R^2).
class UndefinedScoreError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Configuration error tagged with the offending key.
class ConfigError : public ArgumentError {
 public:
  ConfigError(std::string key, const std::string& what)
      : ArgumentError(key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace alrl
