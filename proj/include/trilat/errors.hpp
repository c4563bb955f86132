#pragma once

#include <stdexcept>
#include <string>

namespace trilat {

// Input outside the mathematical domain of an operation (n = 0, s > n, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Request is well-formed but exceeds a configured resource or desk-scale
// limit (sieve too small, range over cap, radical too large to scan).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trilat
