#pragma once

#include <stdexcept>
#include <string>

namespace toda {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidCartanType : Error {
  using Error::Error;
};

/// Binary operation on differential polynomials from different rings.
struct RingMismatch : Error {
  using Error::Error;
};

struct Unsupported : Error {
  using Error::Error;
};

struct NotHomogeneous : Error {
  using Error::Error;
};

/// The graded split g_{-k} = [e, g_{-k-1}] + (s ∩ g_{-k}) failed; only a
/// broken structure-constant table can trigger this.
struct InternalSplitError : Error {
  using Error::Error;
};

struct TruncationExceeded : Error {
  using Error::Error;
};

/// A matrix has a vanishing leading principal minor, so it has no
/// N_- B_+ (or B_- N_+) factorization.
struct NotInBigCell : Error {
  using Error::Error;
};

/// A value left the domain of a real logarithm (solution left the chart).
struct DomainError : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace toda
