#pragma once

#include "fosls/fem.hpp"
#include "fosls/problem.hpp"
#include "fosls/sparse.hpp"
#include "fosls/weight.hpp"

#include <array>
#include <span>
#include <vector>

namespace fosls {

/// Everything the weighted least-squares operator needs. With `rescaled`
/// the flux unknown is w~ = sqrt(eps) grad u; otherwise w = grad u.
/// `k` is the exponent of the curl weight eps^{k/2}.
struct FoslsOperatorSpec {
  const ProblemSpec& problem;
  const WeightSpec& weight;
  const FeSpace& space;
  int quad_points = 0; // per direction; 0 selects p + 3
  double k = 2.0;
  bool rescaled = true;

  int quadrature_points() const noexcept { return quad_points > 0 ? quad_points : space.degree() + 3; }
};

/// Scalar multipliers shared by the residual rows and the norm:
///   grad_u : coefficient of grad u      (sqrt eps)
///   flux   : coefficient of w            (1 rescaled, sqrt eps otherwise)
///   div    : coefficient of div w        (sqrt eps rescaled, eps otherwise)
///   curl   : coefficient of curl w       (eps^{(k-1)/2} rescaled, eps^{k/2} otherwise)
struct OperatorCoefficients {
  double grad_u, flux, div, curl;
};
OperatorCoefficients operator_coefficients(double epsilon, double k, bool rescaled);

/// Residual components (r1x, r1y, r2, r3) of the first-order operator
/// applied to one local basis vector:
///   r1 = flux w - grad_u grad u
///   r2 = -div b^{-1/2} div w + b^{1/2} u
///   r3 = curl (d w2/dx - d w1/dy)
using ResidualRow = std::array<double, 4>;

/// Rows for all 3 (p+1)^2 local basis vectors (field-major) at a reference point.
std::vector<ResidualRow> local_residual_rows(const FoslsOperatorSpec& spec, int element,
                                             const Point2& xi);

/// Coefficient vector laid out as [u | w1 | w2] over the space numbering.
struct SystemField {
  std::vector<double> coefficients;

  std::span<const double> field(const FeSpace& space, Field f) const {
    return std::span<const double>(coefficients)
        .subspan(static_cast<std::size_t>(space.field_offset(f)),
                 static_cast<std::size_t>(space.n_per_field()));
  }
};

struct AssembledSystem {
  SparseSymMatrix matrix;
  std::vector<double> rhs;
};

/// Sparsity pattern coupling every pair of DOFs that share an element.
SparseSymMatrix make_pattern(const FeSpace& space);

/// A_ij = <L phi_i, L phi_j>_beta, rhs_i = <F, L phi_i>_beta.
/// Parallel assembly walks the four element colours in order, so each matrix
/// entry receives its contributions in the same order for any thread count.
AssembledSystem assemble_system(const FoslsOperatorSpec& spec, bool eliminate = true,
                                Execution exec = Execution::parallel);

/// Gram matrix of the weighted product norm
///   ||u||^2 + eps ||grad u||^2 + flux^2 ||w||^2 + div^2 ||div w||^2 + curl^2 ||curl w||^2
/// (all beta-weighted, coefficients from operator_coefficients).
SparseSymMatrix assemble_norm_gram(const FoslsOperatorSpec& spec, bool eliminate = true,
                                   Execution exec = Execution::parallel);

/// Replace boundary rows and columns by identity with zero right-hand side.
/// Throws std::out_of_range for indices outside the matrix.
void apply_dirichlet(SparseSymMatrix& a, std::span<double> rhs, std::span<const int> boundary);
void apply_dirichlet(SparseSymMatrix& a, std::span<const int> boundary);

/// Nodal interpolant of (u*, w*) with w* matching the spec's scaling.
SystemField interpolate_exact(const FoslsOperatorSpec& spec);

/// ||L U - F||_beta^2 evaluated by quadrature, independent of the matrix.
double least_squares_functional(const FoslsOperatorSpec& spec, std::span<const double> field);

} // namespace fosls
