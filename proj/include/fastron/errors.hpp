#pragma once

#include <stdexcept>
#include <string>

namespace fastron {

// Raised when a caller breaks a documented precondition (dimension mismatch,
// out-of-range index, out-of-limit joint vector, degenerate geometry).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised when a point set would contain two identical points; the Gram matrix
// is only guaranteed positive definite for pairwise-distinct points.
class DuplicatePointError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Planner precondition failures (start or goal in collision).
class PlanningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const char* what) {
  if (!cond) [[unlikely]] throw ContractViolation(what);
}

}  // namespace fastron
