#pragma once

#include <stdexcept>
#include <string>

namespace xicp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fewer than 6 correspondences; the 6-DoF problem is underdetermined.
struct TooFewMatches : Error {
  using Error::Error;
};

/// Inputs expressed in different frames were combined.
struct FrameMismatch : Error {
  using Error::Error;
};

/// Re-sampling selected no pairs for a direction flagged partial.
struct EmptySelection : Error {
  using Error::Error;
};

/// A re-sampled 3x3 system stayed ill-conditioned after scaling and
/// regularization.
struct IllConditioned : Error {
  using Error::Error;
};

/// The augmented system is rank deficient: a degenerate direction was left
/// unconstrained.
struct SingularKkt : Error {
  using Error::Error;
};

struct NonFiniteUpdate : Error {
  using Error::Error;
};

struct EmptyScan : Error {
  using Error::Error;
};

struct EmptyAssociation : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace xicp
