#pragma once

#include <stdexcept>
#include <string>

namespace plate {

/// Bad argument passed to a public operation (negative sizes, gamma <= 0, ...).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Derivative order beyond what the element can deliver.
class UnsupportedOrder : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Element geometry is degenerate; the Argyris DOF transformation cannot be inverted.
class SingularTransformation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Requested method/boundary combination is not supported (e.g. eps = 0 in the classical weak form).
class UnsupportedConfiguration : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Factorization met a non-positive pivot.
class NotPositiveDefinite : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Linear solve did not reach the required residual.
class SolverFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Config file could not be parsed or validated. line() is 0 when unknown.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

} // namespace plate
