#include "fosls/solver.hpp"

#include "fosls/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fosls {

void SolverConfig::validate() const {
  if (!(tolerance > 0.0 && tolerance < 1.0)) {
    throw std::invalid_argument("solver tolerance must lie in (0, 1)");
  }
  if (max_iterations < 1) throw std::invalid_argument("solver max_iterations must be >= 1");
}

SolverMethod parse_solver_method(std::string_view name) {
  if (name == "cg" || name == "conjugate-gradient") return SolverMethod::conjugate_gradient;
  if (name == "direct" || name == "sparse-direct") return SolverMethod::sparse_direct;
  if (name == "dense" || name == "dense-fallback") return SolverMethod::dense;
  throw std::invalid_argument("unknown solver method '" + std::string(name) + "'");
}

std::string_view to_string(SolverMethod m) {
  switch (m) {
  case SolverMethod::conjugate_gradient: return "cg";
  case SolverMethod::sparse_direct: return "direct";
  case SolverMethod::dense: return "dense";
  }
  return "?";
}

namespace {

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericalBreakdown(std::string("non-finite value in ") + what);
  }
}

double relative_residual(const SparseSymMatrix& a, std::span<const double> x,
                         std::span<const double> b, Execution exec, std::vector<double>& r) {
  a.multiply(x, r, exec);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const double bn = kernels::norm2(b, exec);
  return bn == 0.0 ? kernels::norm2(r, exec) : kernels::norm2(r, exec) / bn;
}

SolveResult conjugate_gradient(const SparseSymMatrix& a, std::span<const double> b,
                               const SolverConfig& cfg) {
  const Execution exec = cfg.execution;
  const std::size_t n = b.size();
  SolveResult res;
  res.solution.assign(n, 0.0);

  std::vector<double> inv_diag(n, 1.0);
  if (cfg.preconditioner == Preconditioner::diagonal) {
    const std::vector<double> d = a.diagonal();
    for (std::size_t i = 0; i < n; ++i) {
      if (!(d[i] > 0.0)) throw NumericalBreakdown("non-positive diagonal entry; matrix not SPD");
      inv_diag[i] = 1.0 / d[i];
    }
  }

  const double bnorm = kernels::norm2(b, exec);
  if (bnorm == 0.0) return res;

  std::vector<double> r(b.begin(), b.end()), z(n), p(n), ap(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = kernels::dot(r, z, exec);
  if (cfg.record_history) res.history.push_back(std::sqrt(rz));

  double rel = 1.0;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    a.multiply(p, ap, exec);
    const double pap = kernels::dot(p, ap, exec);
    if (!std::isfinite(pap) || pap <= 0.0) {
      throw NumericalBreakdown("conjugate gradient: p^T A p = " + std::to_string(pap));
    }
    const double alpha = rz / pap;
    kernels::axpy(alpha, p, res.solution, exec);
    kernels::axpy(-alpha, ap, r, exec);
    rel = kernels::norm2(r, exec) / bnorm;
    res.iterations = it;
    if (!std::isfinite(rel)) throw NumericalBreakdown("conjugate gradient: residual is not finite");
    if (rel <= cfg.tolerance) {
      // Confirm with the true residual to guard against drift of the recurrence.
      rel = relative_residual(a, res.solution, b, exec, z);
      if (rel <= cfg.tolerance) {
        res.relative_residual = rel;
        if (cfg.record_history) res.history.push_back(rel);
        return res;
      }
      r = z;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = kernels::dot(r, z, exec);
    if (cfg.record_history) res.history.push_back(std::sqrt(rz_new));
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw ConvergenceFailure("conjugate gradient did not reach tolerance in " +
                               std::to_string(cfg.max_iterations) + " iterations (residual " +
                               std::to_string(rel) + ")",
                           rel, cfg.max_iterations);
}

// Factorize D^{-1/2} A D^{-1/2} (unit diagonal) and polish with a few steps
// of iterative refinement against the unscaled matrix.
template <typename Factor>
SolveResult refine(const SparseSymMatrix& a, std::span<const double> b, const SolverConfig& cfg,
                   const Eigen::VectorXd& scale, Factor&& solve_scaled) {
  const std::size_t n = b.size();
  SolveResult res;
  res.solution.assign(n, 0.0);
  std::vector<double> r(b.begin(), b.end());
  double rel = 1.0;
  constexpr int kMaxRefinements = 4;
  for (int pass = 0; pass <= kMaxRefinements; ++pass) {
    Eigen::VectorXd rs(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) rs[i] = scale[i] * r[i];
    const Eigen::VectorXd ys = solve_scaled(rs);
    for (std::size_t i = 0; i < n; ++i) res.solution[i] += scale[i] * ys[i];
    check_finite(res.solution, "direct solution");
    rel = relative_residual(a, res.solution, b, cfg.execution, r);
    res.iterations = pass + 1;
    if (rel <= cfg.tolerance) break;
  }
  res.relative_residual = rel;
  if (rel > cfg.tolerance) {
    throw ConvergenceFailure("direct solve with refinement left residual " + std::to_string(rel), rel,
                             res.iterations);
  }
  return res;
}

Eigen::VectorXd jacobi_scale(const SparseSymMatrix& a) {
  const std::vector<double> d = a.diagonal();
  Eigen::VectorXd s(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0)) throw NumericalBreakdown("non-positive diagonal entry; matrix not SPD");
    s[static_cast<Eigen::Index>(i)] = 1.0 / std::sqrt(d[i]);
  }
  return s;
}

SolveResult sparse_direct(const SparseSymMatrix& a, std::span<const double> b, const SolverConfig& cfg) {
  using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
  const Eigen::VectorXd scale = jacobi_scale(a);
  const int n = a.dimension();

  // CSR of a symmetric pattern read as CSC; keep only the lower triangle.
  std::vector<Eigen::Triplet<double, int>> trip;
  trip.reserve(a.nnz() / 2 + static_cast<std::size_t>(n));
  const auto& ptr = a.row_ptr();
  const auto& col = a.col_index();
  const auto& val = a.values();
  for (int i = 0; i < n; ++i) {
    for (int k = ptr[i]; k < ptr[i + 1]; ++k) {
      const int j = col[k];
      if (j >= i && val[k] != 0.0) trip.emplace_back(j, i, scale[j] * val[k] * scale[i]);
    }
  }
  SpMat lower(n, n);
  lower.setFromTriplets(trip.begin(), trip.end());

  Eigen::SimplicialLDLT<SpMat, Eigen::Lower> factor;
  factor.compute(lower);
  if (factor.info() != Eigen::Success) {
    throw NumericalBreakdown("sparse Cholesky factorization failed; matrix not SPD");
  }
  if (!(factor.vectorD().minCoeff() > 0.0)) {
    throw NumericalBreakdown("sparse LDL^T produced a non-positive pivot; matrix not SPD");
  }
  return refine(a, b, cfg, scale, [&](const Eigen::VectorXd& rhs) {
    Eigen::VectorXd y = factor.solve(rhs);
    return y;
  });
}

SolveResult dense(const SparseSymMatrix& a, std::span<const double> b, const SolverConfig& cfg) {
  const int n = a.dimension();
  if (n > kDenseLimit) {
    throw std::invalid_argument("dense solver limited to " + std::to_string(kDenseLimit) +
                                " unknowns, got " + std::to_string(n));
  }
  const Eigen::VectorXd scale = jacobi_scale(a);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const auto& ptr = a.row_ptr();
  const auto& col = a.col_index();
  const auto& val = a.values();
  for (int i = 0; i < n; ++i) {
    for (int k = ptr[i]; k < ptr[i + 1]; ++k) m(i, col[k]) = scale[i] * val[k] * scale[col[k]];
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalBreakdown("dense Cholesky failed; matrix not SPD");
  return refine(a, b, cfg, scale, [&](const Eigen::VectorXd& rhs) {
    Eigen::VectorXd y = llt.solve(rhs);
    return y;
  });
}

} // namespace

SolveResult solve_spd(const SparseSymMatrix& a, std::span<const double> rhs, const SolverConfig& config) {
  config.validate();
  if (static_cast<int>(rhs.size()) != a.dimension()) {
    throw std::invalid_argument("solve_spd: right-hand side length does not match matrix");
  }
  check_finite(a.values(), "matrix");
  check_finite(rhs, "right-hand side");
  switch (config.method) {
  case SolverMethod::conjugate_gradient: return conjugate_gradient(a, rhs, config);
  case SolverMethod::sparse_direct: return sparse_direct(a, rhs, config);
  case SolverMethod::dense: return dense(a, rhs, config);
  }
  throw std::invalid_argument("solve_spd: unknown method");
}

} // namespace fosls
