#pragma once

#include "fosls/mesh.hpp"

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace fosls {

using Point2 = std::array<double, 2>;

/// Tensor Gauss-Legendre rule on [-1,1]^2 with q points per direction.
struct QuadratureRule {
  int points_per_direction = 0;
  std::vector<double> points_1d;
  std::vector<double> weights_1d;
  std::vector<Point2> points; // x fastest
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
};

/// q in [1, 12]; throws std::invalid_argument otherwise.
QuadratureRule gauss_rule(int points_per_direction);

struct BasisEval {
  std::vector<double> values;
  std::vector<Point2> gradients; // reference-coordinate gradients
};

/// Tensor-product Lagrange basis Q_p on equispaced nodes of [-1,1]^2.
/// Local index a + (p+1) * b for 1D node indices (a, b).
class ReferenceBasis {
public:
  explicit ReferenceBasis(int degree);

  int degree() const noexcept { return degree_; }
  int n_1d() const noexcept { return degree_ + 1; }
  int n_local() const noexcept { return n_1d() * n_1d(); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }

  double value_1d(int k, double xi) const;
  double derivative_1d(int k, double xi) const;
  BasisEval eval(const Point2& xi) const;

private:
  int degree_;
  std::vector<double> nodes_;
  std::vector<double> denominators_;
};

BasisEval eval_basis(int degree, const Point2& xi);

/// Basis values and reference derivatives at every point of a rule,
/// laid out [point * n_basis + basis].
struct BasisTable {
  int n_points = 0;
  int n_basis = 0;
  std::vector<double> value;
  std::vector<double> d_xi;
  std::vector<double> d_eta;
};

BasisTable tabulate(const ReferenceBasis& basis, const QuadratureRule& rule);

/// Affine map from the reference square onto a rectangle.
struct ElementMap {
  double scale_x;  // d xi / dx = 2 / hx
  double scale_y;  // d eta / dy = 2 / hy
  double measure;  // |J| = hx hy / 4
  double x0, y0, hx, hy;

  Point2 to_physical(const Point2& xi) const noexcept {
    return {x0 + 0.5 * (xi[0] + 1.0) * hx, y0 + 0.5 * (xi[1] + 1.0) * hy};
  }
  Point2 gradient(const Point2& reference_grad) const noexcept {
    return {reference_grad[0] * scale_x, reference_grad[1] * scale_y};
  }
};

/// Throws std::invalid_argument for a degenerate rectangle.
ElementMap push_forward(const Rect& element);

enum class Field : int { u = 0, w1 = 1, w2 = 2 };
inline constexpr int kFieldCount = 3;

/// Continuous Q_p space used for all three fields (u, w1, w2). Global DOFs
/// are field-major; within a field nodes are lexicographic (x fastest).
class FeSpace {
public:
  FeSpace(TensorMesh2D mesh, int degree);

  const TensorMesh2D& mesh() const noexcept { return mesh_; }
  const ReferenceBasis& basis() const noexcept { return basis_; }
  int degree() const noexcept { return basis_.degree(); }

  int nodes_x() const noexcept { return degree() * mesh_.nx() + 1; }
  int nodes_y() const noexcept { return degree() * mesh_.ny() + 1; }
  int n_per_field() const noexcept { return nodes_x() * nodes_y(); }
  int n_total() const noexcept { return kFieldCount * n_per_field(); }
  int n_local() const noexcept { return basis_.n_local(); }

  int field_offset(Field f) const noexcept { return static_cast<int>(f) * n_per_field(); }
  int node_index(int I, int J) const noexcept { return I + nodes_x() * J; }
  Point2 node_coordinate(int node) const;

  /// Node (within a field) of local basis function `local` on `element`.
  void element_nodes(int element, std::span<int> out) const;

  /// Sorted global indices of u-field DOFs on the boundary of the unit square.
  const std::vector<int>& boundary_dofs() const noexcept { return boundary_; }

private:
  TensorMesh2D mesh_;
  ReferenceBasis basis_;
  std::vector<int> boundary_;
  std::vector<double> node_x_;
  std::vector<double> node_y_;
};

FeSpace build_space(const TensorMesh2D& mesh, int degree);

/// Nodal interpolant of a scalar function on one field's node set.
std::vector<double> interpolate(const FeSpace& space,
                                const std::function<double(double, double)>& fn);

/// Evaluate a single-field nodal vector at a physical point.
double evaluate(const FeSpace& space, std::span<const double> nodal, const Point2& x);

} // namespace fosls
