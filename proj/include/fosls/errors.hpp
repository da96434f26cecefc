#pragma once

#include <stdexcept>
#include <string>

namespace fosls {

/// Raised when an operation needs data the caller did not supply
/// (e.g. error measurement without an exact solution).
class UnsupportedOperation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Iterative solve stopped at the iteration cap.
class ConvergenceFailure : public std::runtime_error {
public:
  ConvergenceFailure(const std::string& what, double achieved_residual, int iterations)
      : std::runtime_error(what), achieved_residual_(achieved_residual),
        iterations_(iterations) {}

  double achieved_residual() const noexcept { return achieved_residual_; }
  int iterations() const noexcept { return iterations_; }

private:
  double achieved_residual_;
  int iterations_;
};

/// NaN/Inf or a non-positive curvature encountered inside a solver.
class NumericalBreakdown : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad command line or config file.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace fosls
