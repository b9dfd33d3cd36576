#pragma once

#include <stdexcept>
#include <string>

namespace hyperifs {

/// Arguments outside the domain of an operation (mismatched manifolds,
/// radii beyond the injectivity bound, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A map capability was requested that the system does not provide,
/// e.g. an inverse letter on a non-invertible generator.
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Search or enumeration budget misconfigured or exceeded.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An example configuration violates one of its construction conditions.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller-supplied input rejected (bad sampler output, malformed config).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace hyperifs
