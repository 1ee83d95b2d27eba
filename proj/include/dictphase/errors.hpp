#pragma once

#include <stdexcept>
#include <string>

namespace dictphase {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand dimensions disagree or an index is out of range.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Enumeration would exceed the caller's budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// Equality-constrained problem has no feasible point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// A named precondition clause failed. clause() is a stable short identifier
// ("null-space", "atom-sparsity", ...) that callers and tests can match on.
class PreconditionError : public Error {
 public:
  PreconditionError(std::string clause, const std::string& what)
      : Error(clause + ": " + what), clause_(std::move(clause)) {}

  const std::string& clause() const { return clause_; }

 private:
  std::string clause_;
};

}  // namespace dictphase
