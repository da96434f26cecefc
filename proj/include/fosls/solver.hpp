#pragma once

#include "fosls/sparse.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace fosls {

enum class SolverMethod { conjugate_gradient, sparse_direct, dense };
enum class Preconditioner { none, diagonal };

struct SolverConfig {
  SolverMethod method = SolverMethod::conjugate_gradient;
  double tolerance = 1e-10; // relative residual ||Ax - b|| / ||b||
  int max_iterations = 50000;
  Preconditioner preconditioner = Preconditioner::diagonal;
  bool record_history = false;
  Execution execution = Execution::parallel;

  /// Throws std::invalid_argument unless tolerance in (0,1) and max_iterations >= 1.
  void validate() const;
};

SolverMethod parse_solver_method(std::string_view name);
std::string_view to_string(SolverMethod m);

struct SolveResult {
  std::vector<double> solution;
  int iterations = 0;
  double relative_residual = 0.0;
  /// Preconditioned residual norm sqrt(r^T M^{-1} r) per CG iteration (when recorded).
  std::vector<double> history;
};

/// Largest system the dense path accepts (3 fields x 2000 DOFs).
inline constexpr int kDenseLimit = 6000;

/// Solve A x = b for symmetric positive definite A.
/// Throws ConvergenceFailure when the tolerance is not met and
/// NumericalBreakdown on non-finite values or loss of definiteness.
SolveResult solve_spd(const SparseSymMatrix& a, std::span<const double> rhs,
                      const SolverConfig& config = {});

} // namespace fosls
