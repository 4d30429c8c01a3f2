#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace svdpert {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class DimensionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "dimension"; }
};

class PreconditionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "precondition"; }
};

class NotHermitianError : public Error {
 public:
  NotHermitianError(std::size_t row, std::size_t col, double magnitude);
  const char* kind() const noexcept override { return "not_hermitian"; }

  std::size_t row;
  std::size_t col;
  double magnitude;  // |h(i,j) - conj(h(j,i))|
};

/// An iterative method (Jacobi sweep, fixed point) ran out of iterations.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, double last_measure);
  const char* kind() const noexcept override { return "convergence"; }

  int iterations;
  double last_measure;
};

/// A Sylvester-type problem whose spectra are not separated by the admissible gap.
class SingularProblemError : public Error {
 public:
  SingularProblemError(double mu, double nu, double gap, double gap_tol);
  const char* kind() const noexcept override { return "singular_problem"; }

  double mu;
  double nu;
  double gap;
  double gap_tol;
};

/// A post-condition verified at runtime did not hold.
class VerificationError : public Error {
 public:
  VerificationError(const std::string& what, double measured, double threshold);
  const char* kind() const noexcept override { return "verification"; }

  double measured;
  double threshold;
};

}  // namespace svdpert
