#pragma once

#include <stdexcept>
#include <string>

namespace pemi {

/// Invalid numeric argument (non-positive quantile level, zero total weight, ...).
using DomainError = std::domain_error;

/// A rule, engine or experiment was configured inconsistently with its input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated an operation's precondition (e.g. asked for a prediction
/// set at a time point that was not selected).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pemi
