#pragma once

#include <stdexcept>
#include <string>

namespace nuqmc {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold (bad dimension,
/// coordinate outside [0,1], N > sqrt(K), ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The requested computation exceeds its configured work or memory budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}

}  // namespace detail

}  // namespace nuqmc
