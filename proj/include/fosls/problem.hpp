#pragma once

#include "fosls/fem.hpp"

#include <array>
#include <functional>
#include <optional>

namespace fosls {

using ScalarField = std::function<double(const Point2&)>;
using VectorField = std::function<Point2(const Point2&)>;

/// Closed-form solution with the derivatives needed for error measurement.
struct ExactSolution {
  ScalarField value;
  VectorField gradient;
  ScalarField laplacian;
};

/// -eps Laplace(u) + b u = f on the unit square, u = 0 on the boundary.
struct ProblemSpec {
  double epsilon = 1.0;
  ScalarField reaction;  // b
  double b0 = 1.0;       // lower bound of b
  double b1 = 1.0;       // upper bound of b
  ScalarField source;    // f
  std::optional<ExactSolution> exact;
  std::array<bool, 2> layer_at_zero{true, true};
  std::array<bool, 2> layer_at_one{false, false};
};

/// Boundary-layer profile (e^{-t/sqrt(eps)} - e^{-1/sqrt(eps)}) / (1 - e^{-1/sqrt(eps)})
/// and its first two derivatives, evaluated without cancellation or overflow.
struct LayerProfile {
  double value, d1, d2;
};
LayerProfile layer_profile(double epsilon, double t);

/// Manufactured benchmark with b = 1, edge layers at x = 0 and y = 0 and a
/// corner layer at the origin:
///   u = (cos(pi x / 2) - phi(x)) (1 - y - phi(y)),  f = -eps Laplace(u) + u.
ProblemSpec manufactured_problem(double epsilon);

/// f = 0, b = 1 and the zero exact solution.
ProblemSpec zero_problem(double epsilon);

/// Exact u, grad u and the flux variable: w = sqrt(eps) grad u when rescaled,
/// w = grad u otherwise. div_flux is the matching divergence.
struct ExactFields {
  double u;
  Point2 grad_u;
  Point2 flux;
  double div_flux;
};

/// Throws UnsupportedOperation when the problem has no exact solution.
ExactFields eval_exact_fields(const ProblemSpec& problem, const Point2& x, bool rescaled = true);

struct CoefficientAudit {
  double min_b, max_b;
  bool within_bounds;
};

/// Sample b on an n x n grid and compare with the declared bounds.
CoefficientAudit audit_reaction_bounds(const ProblemSpec& problem, int n = 64);

} // namespace fosls
