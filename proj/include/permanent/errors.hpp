#pragma once

#include <stdexcept>

namespace permanent {

/// Base type for all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input text is malformed in the requested format.
struct ParseError : Error {
  using Error::Error;
};

/// Matrix input is ragged or not square.
struct ShapeError : Error {
  using Error::Error;
};

/// An entry is NaN or infinite.
struct ValueError : Error {
  using Error::Error;
};

/// A size guard on an exponential- or factorial-cost routine was exceeded.
struct DimensionTooLarge : Error {
  using Error::Error;
};

/// Operands have incompatible dimensions.
struct DimensionMismatch : Error {
  using Error::Error;
};

/// Constant term is zero, so no series inverse exists.
struct NonInvertible : Error {
  using Error::Error;
};

/// A matrix required to be symmetric is not.
struct NotSymmetric : Error {
  using Error::Error;
};

/// A factorization pivot was not positive.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

/// An exponent left the double-precision range.
struct OverflowToInfinity : Error {
  using Error::Error;
};

}  // namespace permanent
