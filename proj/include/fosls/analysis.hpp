#pragma once

#include "fosls/assembly.hpp"
#include "fosls/solver.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fosls {

/// Squared, weighted pieces of the balanced norm of an error (e_u, e_w):
/// mass_u, grad_u, mass_flux, div_flux, curl_flux.
using NormComponents = std::array<double, 5>;

struct BetaNormError {
  double value = 0.0;
  NormComponents components{};
};

/// Balanced-norm distance between a discrete field and the exact solution,
/// integrated with `extra_points` more Gauss points per direction than the
/// assembly rule (capped at 12).
BetaNormError beta_norm_error(const FoslsOperatorSpec& spec, std::span<const double> field,
                              int extra_points = 2, Execution exec = Execution::parallel);

/// max over all u-field nodes of |u*(node) - u_h(node)|.
double max_norm_error(const FeSpace& space, std::span<const double> u_nodal, const ExactSolution& exact);

/// err[i] / err[i-1]; throws std::domain_error on a zero denominator.
std::vector<double> reduction_rates(std::span<const double> errors);

/// ((N^-1 ln N) / ((N/2)^-1 ln(N/2)))^m.
double expected_rate(int power, int n_elements);

struct ErrorReport {
  double epsilon = 0.0;
  int n_elements = 0;
  int degree = 0;
  double beta_norm_error = 0.0;
  double max_norm_error = 0.0;
  NormComponents components{};
  int iterations = 0;
  double relative_residual = 0.0;
  double assemble_seconds = 0.0;
  double solve_seconds = 0.0;
  int dofs = 0;
};

enum class ProblemKind { manufactured, zero };

struct StudySettings {
  std::vector<double> epsilons;
  std::vector<int> n_elements;
  int degree = 1;
  double gamma = 0.5;
  double k = 2.0;
  bool rescaled = true;
  int quad_points = 0; // 0: p + 3
  int error_extra_points = 2;
  ProblemKind problem = ProblemKind::manufactured;
  SolverConfig solver{SolverMethod::sparse_direct};
};

ProblemSpec make_problem(ProblemKind kind, double epsilon);

/// Mesh, space and weight for one (eps, N) cell.
struct Discretization {
  ProblemSpec problem;
  WeightSpec weight;
  FeSpace space;

  FoslsOperatorSpec operator_spec(const StudySettings& s) const {
    return {problem, weight, space, s.quad_points, s.k, s.rescaled};
  }
};

Discretization discretize(const StudySettings& settings, double epsilon, int n_elements);

struct PipelineResult {
  ErrorReport report;
  SystemField solution;
};

/// Build, assemble, solve and measure a single cell.
PipelineResult solve_pipeline(const StudySettings& settings, double epsilon, int n_elements);

struct StudyCell {
  bool ok = false;
  ErrorReport report;
  std::string failure;
};

class ConvergenceTable {
public:
  ConvergenceTable(std::vector<double> epsilons, std::vector<int> n_elements, int degree);

  const std::vector<double>& epsilons() const noexcept { return eps_; }
  const std::vector<int>& n_elements() const noexcept { return ns_; }
  int degree() const noexcept { return degree_; }

  StudyCell& at(std::size_t ie, std::size_t in) { return cells_[ie * ns_.size() + in]; }
  const StudyCell& at(std::size_t ie, std::size_t in) const { return cells_[ie * ns_.size() + in]; }

  /// err(N)/err(N/2) when the previous column is N/2 and both cells succeeded.
  std::optional<double> beta_rate(std::size_t ie, std::size_t in) const;
  std::optional<double> max_rate(std::size_t ie, std::size_t in) const;

  bool all_ok() const;

private:
  std::optional<double> rate(std::size_t ie, std::size_t in, double ErrorReport::*member) const;

  std::vector<double> eps_;
  std::vector<int> ns_;
  int degree_;
  std::vector<StudyCell> cells_;
};

/// Runs every (eps, N) cell; solver failures mark the cell instead of aborting.
ConvergenceTable run_convergence_study(const StudySettings& settings);

/// Columns: epsilon,N,p,beta_norm_err,beta_rate,max_norm_err,max_rate,iterations,solve_seconds.
/// With timing off the solve_seconds column is written as 0 for byte-reproducible output.
void write_csv(const ConvergenceTable& table, std::ostream& out, bool timing = true);

/// Two blocks (balanced-norm and discrete max-norm errors), rows eps, columns N,
/// entries "1.921e-01 (0.62)".
void write_markdown(const ConvergenceTable& table, std::ostream& out);

} // namespace fosls
