#pragma once

#include <stdexcept>
#include <string>

namespace fluxlab {

// Base of every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition or type invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Evaluation at (or too close to) a point source.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// A point lies on a loop edge, so its winding number is undefined.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

// Quadrature or iteration failed to reach its tolerance.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double estimated_error)
      : Error(what), estimated_error_(estimated_error) {}

  double estimated_error() const { return estimated_error_; }

 private:
  double estimated_error_;
};

}  // namespace fluxlab
