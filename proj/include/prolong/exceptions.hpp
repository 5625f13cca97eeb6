#pragma once

#include <stdexcept>
#include <string>

namespace prolong {

/// Bad user input: malformed config, unknown keys, out-of-range parameters.
/// CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A structural self-check failed (bracket relations, Hodge dimension
/// arithmetic, verification mismatch). CLI maps this to exit code 3.
class InvariantError : public std::runtime_error {
public:
  explicit InvariantError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical instability: rank decisions without a clear singular-value gap,
/// step-size underflow, stencil margin violations. CLI maps this to exit
/// code 4.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace prolong
