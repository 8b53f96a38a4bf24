#pragma once

#include <stdexcept>

namespace sparselab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (negative t, p < 1, mismatched grids, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The Legendre supremum did not stabilize inside the evaluation grid.
class UnboundedError : public Error {
 public:
  using Error::Error;
};

/// A series whose terms do not decay by the truncation cap.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Zero or non-finite denominator in a ratio.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Malformed spec string or configuration value.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace sparselab
