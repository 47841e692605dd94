#pragma once

#include <stdexcept>
#include <string>

namespace geodeq {

// Base for every library failure that a caller may want to report.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input could not be interpreted (bad spec, malformed JSON, wrong arity).
class SpecError : public Error {
 public:
  using Error::Error;
};

// Point outside the usable chart, or sampling rejected too many points.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Matrix singular to working precision where an inverse was required.
class SingularError : public Error {
 public:
  using Error::Error;
};

// Iterative method failed to converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Eigenvalue clusters collide or overlap a forbidden region.
class SpectralError : public Error {
 public:
  using Error::Error;
};

}  // namespace geodeq
