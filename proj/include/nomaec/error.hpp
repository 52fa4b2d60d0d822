#pragma once

#include <stdexcept>
#include <string>

namespace nomaec {

/// Argument outside the documented domain of a function.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A numerical scheme could not reach its requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid scenario, control or sweep configuration.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Not enough data for a statistical estimate.
class InsufficientDataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace nomaec
