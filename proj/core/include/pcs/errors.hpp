#pragma once

#include <stdexcept>
#include <string>

namespace pcs {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad dimension, out-of-range value, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The constraint set is empty, e.g. floor fraction c with c*m > 1.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed its size guard.
class GuardExceeded : public Error {
 public:
  using Error::Error;
};

/// A zero Poisson mean was paired with a positive count.
class ImpossibleObservation : public Error {
 public:
  using Error::Error;
};

/// A numeric search ran out of its bracket.
class BracketExhausted : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcs
