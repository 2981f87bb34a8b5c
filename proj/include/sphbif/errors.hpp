#pragma once

#include <stdexcept>
#include <string>

namespace sphbif {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Sequence lengths that must agree do not.
class LengthMismatch : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (convergence, resolution, integration).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Quadrature too coarse for the requested basis.
class BasisError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// w + 1 <= 0 somewhere, so (w+1)^p is undefined.
class ConstraintViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A converged solution is not in the requested nodal class.
class NodalMismatch : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonSimpleZero : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EndpointZero : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BlowupDetected : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ToleranceFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace sphbif
