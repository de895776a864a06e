#pragma once

#include <stdexcept>
#include <string>

namespace requ {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyNetwork : public Error {
 public:
  EmptyNetwork() : Error("network has no layers") {}
};

class NonFiniteEntry : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class EmptyList : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

class EmptySnapshotSet : public Error {
 public:
  EmptySnapshotSet() : Error("no snapshot parameters given") {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace requ
