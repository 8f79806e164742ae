#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace skyris {

// Input outside the mathematical domain of an operation (negative variance,
// non-finite angle, non-positive distance, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Shapes or structure do not line up (dimension mismatch, odd RIS size,
// non-symmetric block).
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Object used out of order, e.g. stepping an environment before reset.
class LifecycleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration rejected; carries every offending key.
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(std::vector<std::string> keys, const std::string& what);
  const std::vector<std::string>& keys() const noexcept { return keys_; }

 private:
  std::vector<std::string> keys_;
};

}  // namespace skyris
