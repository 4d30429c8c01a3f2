#include "svdpert/errors.hpp"

#include <cstdio>

namespace svdpert {

namespace {

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", x);
  return buf;
}

}  // namespace

NotHermitianError::NotHermitianError(std::size_t row, std::size_t col, double magnitude)
    : Error("matrix is not Hermitian: |h(" + std::to_string(row) + "," + std::to_string(col) +
            ") - conj(h(" + std::to_string(col) + "," + std::to_string(row) +
            "))| = " + fmt_double(magnitude)),
      row(row),
      col(col),
      magnitude(magnitude) {}

ConvergenceError::ConvergenceError(const std::string& what, int iterations, double last_measure)
    : Error(what + " did not converge after " + std::to_string(iterations) +
            " iterations (last measure " + fmt_double(last_measure) + ")"),
      iterations(iterations),
      last_measure(last_measure) {}

SingularProblemError::SingularProblemError(double mu, double nu, double gap, double gap_tol)
    : Error("spectra not separated: nearest pair mu=" + fmt_double(mu) + ", nu=" +
            fmt_double(nu) + " has gap " + fmt_double(gap) + " < gap_tol " +
            fmt_double(gap_tol)),
      mu(mu),
      nu(nu),
      gap(gap),
      gap_tol(gap_tol) {}

VerificationError::VerificationError(const std::string& what, double measured, double threshold)
    : Error(what + ": measured " + fmt_double(measured) + " exceeds " + fmt_double(threshold)),
      measured(measured),
      threshold(threshold) {}

}  // namespace svdpert
