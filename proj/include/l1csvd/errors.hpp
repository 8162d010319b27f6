#pragma once

#include <stdexcept>
#include <string>

namespace l1csvd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes do not conform, or a requested size exceeds what the input allows.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Requested component count exceeds the numerical rank of the data.
class RankError : public Error {
 public:
  using Error::Error;
};

/// Input is (numerically) singular or otherwise degenerate for the operation.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine failed to produce finite output.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Problem size beyond the guard of an exhaustive routine.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of the callee was violated by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable input file.
class IngestionError : public Error {
 public:
  using Error::Error;
};

}  // namespace l1csvd
