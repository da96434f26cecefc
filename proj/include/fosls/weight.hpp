#pragma once

#include "fosls/fem.hpp"

#include <array>
#include <vector>

namespace fosls {

/// Layer-adapted least-squares weight
///   beta(x) = prod_i (1 + eps^{-1/2} exp(-gamma * dist_i(x) / sqrt(eps)))
/// where the product runs over the faces flagged as carrying a layer and
/// dist_i is the distance to that face.
///
/// gamma and the coercivity margin C are tied by gamma = sqrt(b0) / ((1 + C) sqrt(d)).
struct WeightSpec {
  double epsilon = 1.0;
  double gamma = 0.5;
  double margin = 0.0; // C
  int dims = 2;
  std::array<bool, 2> layer_at_zero{true, true};
  std::array<bool, 2> layer_at_one{false, false};

  /// gamma is the user knob; C = sqrt(b0)/(gamma sqrt(d)) - 1 must come out positive.
  static WeightSpec from_gamma(double epsilon, double gamma, double b0, int dims = 2);
  /// C is the user knob; gamma follows.
  static WeightSpec from_margin(double epsilon, double margin, double b0, int dims = 2);

  /// Same spec with all layer flags cleared (beta == 1).
  WeightSpec without_layers() const;
};

double beta_eval(const WeightSpec& spec, const Point2& x);
Point2 grad_beta(const WeightSpec& spec, const Point2& x);

/// One-dimensional factor 1 + eps^{-1/2} exp(-gamma t / sqrt(eps)).
double beta_factor(double epsilon, double gamma, double t);

/// Per-axis sample coordinates: half the points packed into the layer
/// region near each flagged face, the rest spread uniformly.
std::vector<double> layer_refined_samples(const WeightSpec& spec, int axis, int count);

struct WeightAudit {
  double max_ratio = 0.0;
  Point2 argmax{0.0, 0.0};
  long samples = 0;
};

/// max over samples of eps (1 + C)^2 |grad beta|^2 / (b0 beta^2). The
/// weight satisfies the coercivity hypothesis when this stays below 1.
WeightAudit audit_weight_bound(const WeightSpec& spec, double b0, const std::vector<Point2>& samples);

/// Tensor grid built from layer_refined_samples on both axes.
std::vector<Point2> layer_refined_grid(const WeightSpec& spec, int per_axis);

/// Closed-form 1D integrals used to check the balance of the weighted norm
/// (exponentially small terms kept):
///   weight   = int_0^1 beta_1
///   layer    = int_0^1 beta_1(x) exp(-2 x sqrt(b0 / (2 eps)))
struct BalanceIntegrals {
  double weight = 0.0;
  double layer = 0.0;
};

BalanceIntegrals balance_integrals(double gamma, double epsilon, double b0);

/// The same two integrals by composite Gauss quadrature on a 1D layer mesh.
BalanceIntegrals balance_integrals_quadrature(double gamma, double epsilon, double b0,
                                              const ShishkinMesh1D& mesh, int points_per_element);

} // namespace fosls
