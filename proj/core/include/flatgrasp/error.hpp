#pragma once

#include <stdexcept>
#include <string>

namespace flatgrasp {

// Base class for every error raised by the library. The CLI maps the
// subclasses onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed something outside an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// sample_pose could not fit the object into the workspace.
class PlacementFailure : public Error {
 public:
  using Error::Error;
};

// A loss or gradient went non-finite.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

// Checkpoint/snapshot does not match the architecture it is restored onto,
// or the file is corrupt.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace flatgrasp
