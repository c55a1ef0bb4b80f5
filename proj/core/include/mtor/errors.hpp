#pragma once

#include <stdexcept>
#include <string>

namespace mtor {

/// Precondition violations: bad sizes, out-of-range hyperparameters, invalid task indices.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Rank correlation is undefined (a series has zero rank variance).
class UndefinedCorrelationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A linear system is singular or too ill-conditioned to solve reliably.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A recursion lost numerical validity (non-positive denominator or Schur complement).
class NumericalBreakdownError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A hard resource cap was exceeded (stacked dimension, dictionary size).
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries a 1-based (row, column) location when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long row, long col)
      : std::runtime_error(what), row_(row), col_(col) {}
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}

  long row() const { return row_; }
  long col() const { return col_; }

 private:
  long row_ = -1;
  long col_ = -1;
};

/// Relative metrics cannot be formed (persistence error is exactly zero).
class DivisionByZeroError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mtor
