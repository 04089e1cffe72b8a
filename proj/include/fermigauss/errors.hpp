#pragma once

#include <stdexcept>
#include <string>

namespace fermigauss {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mode count above the configured Fock-space cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A matrix violates the block structure it is supposed to carry.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument was not met.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Parameters outside the region where a closed form is valid.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The +/- eigenvalue pairing could not be resolved.
class DegenerateSpectrumError : public Error {
 public:
  using Error::Error;
};

/// Matrix logarithm would leave the principal branch.
class BranchError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

}  // namespace fermigauss
