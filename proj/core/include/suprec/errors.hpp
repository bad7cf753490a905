#pragma once

#include <stdexcept>
#include <string>

namespace suprec {

/// A ProblemConfig, SweepSpec or parameter set violates its invariants.
class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Data handed to an operation is malformed (dimension mismatch, empty batch, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical precondition failed, e.g. a Gram matrix that is not positive definite.
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sweep's declared cost exceeds the operation budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace suprec
