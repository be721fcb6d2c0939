#pragma once

#include <stdexcept>
#include <string>

namespace iga {

/// Invalid argument or value outside the admissible domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Structural mismatch between objects that must agree (dimensions, traces).
class MismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Factorization/solve failures: singular, indefinite where definiteness was
/// required, residual above the contract bound, or no convergence.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run or model configuration. The message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace iga
