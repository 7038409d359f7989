#pragma once

#include <stdexcept>
#include <string>

namespace cbs {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Model construction rejected (nonpositive velocity, crossing interfaces, ...).
struct InvalidModelError : Error {
  using Error::Error;
};

/// A scalar parameter is outside its admissible range.
struct InvalidParameterError : Error {
  using Error::Error;
};

/// The contrast vanishes identically; no positive damping can be derived from it.
struct DegenerateModelError : Error {
  using Error::Error;
};

/// Field dimensions do not match the grid they are used with.
struct ShapeError : Error {
  using Error::Error;
};

/// Evaluation requested at a singular point (r = 0 of the Green's function).
struct SingularityError : Error {
  using Error::Error;
};

/// Direct or iterative linear solve failed its residual contract.
struct SolverError : Error {
  using Error::Error;
};

/// NaN/Inf appeared in an iterate.
struct NumericalBlowupError : Error {
  using Error::Error;
};

/// Reference field for a relative norm has zero norm.
struct UndefinedReferenceError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace cbs
