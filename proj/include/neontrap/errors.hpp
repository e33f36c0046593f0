#pragma once

#include <stdexcept>
#include <string>

namespace neontrap {

// Argument outside the mathematical domain of an operation (negative k, z <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The requested configuration has no bound state (quasi-bound under a tilting field,
// or a lateral trap too shallow for the box).
class UnboundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical step failed its own acceptance check (spline validation, non-finite samples).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace neontrap
