#include "fosls/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fosls {

namespace {

// Legendre P_n and its derivative by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

std::vector<double> axis_nodes(const ShishkinMesh1D& m, int degree) {
  const int n = m.n_elements();
  std::vector<double> out(static_cast<std::size_t>(degree * n + 1));
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < degree; ++a) {
      out[static_cast<std::size_t>(degree * i + a)] =
          m.left(i) + (static_cast<double>(a) / degree) * m.width(i);
    }
  }
  out.back() = m.breakpoints().back();
  return out;
}

} // namespace

QuadratureRule gauss_rule(int q) {
  if (q < 1 || q > 12) {
    throw std::invalid_argument("gauss_rule: points per direction must be in [1, 12], got " +
                                std::to_string(q));
  }
  QuadratureRule rule;
  rule.points_per_direction = q;
  rule.points_1d.resize(static_cast<std::size_t>(q));
  rule.weights_1d.resize(static_cast<std::size_t>(q));

  for (int i = 0; i < q; ++i) {
    // Chebyshev-like initial guess, then Newton on P_q.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(q, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, dp] = legendre(q, x);
    (void)p;
    // ascending order
    rule.points_1d[static_cast<std::size_t>(q - 1 - i)] = x;
    rule.weights_1d[static_cast<std::size_t>(q - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (q % 2 == 1) rule.points_1d[static_cast<std::size_t>(q / 2)] = 0.0;

  for (int j = 0; j < q; ++j) {
    for (int i = 0; i < q; ++i) {
      rule.points.push_back({rule.points_1d[i], rule.points_1d[j]});
      rule.weights.push_back(rule.weights_1d[i] * rule.weights_1d[j]);
    }
  }
  return rule;
}

ReferenceBasis::ReferenceBasis(int degree) : degree_(degree) {
  if (degree < 1 || degree > 3) {
    throw std::invalid_argument("unsupported polynomial degree " + std::to_string(degree) +
                                " (expected 1, 2 or 3)");
  }
  for (int k = 0; k <= degree; ++k) nodes_.push_back(-1.0 + 2.0 * k / degree);
  for (int k = 0; k <= degree; ++k) {
    double d = 1.0;
    for (int m = 0; m <= degree; ++m) {
      if (m != k) d *= nodes_[k] - nodes_[m];
    }
    denominators_.push_back(d);
  }
}

double ReferenceBasis::value_1d(int k, double xi) const {
  double v = 1.0;
  for (int m = 0; m <= degree_; ++m) {
    if (m != k) v *= xi - nodes_[m];
  }
  return v / denominators_[k];
}

double ReferenceBasis::derivative_1d(int k, double xi) const {
  double sum = 0.0;
  for (int m = 0; m <= degree_; ++m) {
    if (m == k) continue;
    double prod = 1.0;
    for (int l = 0; l <= degree_; ++l) {
      if (l != k && l != m) prod *= xi - nodes_[l];
    }
    sum += prod;
  }
  return sum / denominators_[k];
}

BasisEval ReferenceBasis::eval(const Point2& xi) const {
  const int n = n_1d();
  std::vector<double> vx(n), vy(n), dx(n), dy(n);
  for (int k = 0; k < n; ++k) {
    vx[k] = value_1d(k, xi[0]);
    vy[k] = value_1d(k, xi[1]);
    dx[k] = derivative_1d(k, xi[0]);
    dy[k] = derivative_1d(k, xi[1]);
  }
  BasisEval out;
  out.values.resize(static_cast<std::size_t>(n_local()));
  out.gradients.resize(static_cast<std::size_t>(n_local()));
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      const int i = a + n * b;
      out.values[i] = vx[a] * vy[b];
      out.gradients[i] = {dx[a] * vy[b], vx[a] * dy[b]};
    }
  }
  return out;
}

BasisEval eval_basis(int degree, const Point2& xi) { return ReferenceBasis(degree).eval(xi); }

BasisTable tabulate(const ReferenceBasis& basis, const QuadratureRule& rule) {
  BasisTable t;
  t.n_points = static_cast<int>(rule.size());
  t.n_basis = basis.n_local();
  const auto total = static_cast<std::size_t>(t.n_points) * static_cast<std::size_t>(t.n_basis);
  t.value.resize(total);
  t.d_xi.resize(total);
  t.d_eta.resize(total);
  for (int q = 0; q < t.n_points; ++q) {
    const BasisEval e = basis.eval(rule.points[q]);
    for (int i = 0; i < t.n_basis; ++i) {
      const std::size_t k = static_cast<std::size_t>(q) * t.n_basis + i;
      t.value[k] = e.values[i];
      t.d_xi[k] = e.gradients[i][0];
      t.d_eta[k] = e.gradients[i][1];
    }
  }
  return t;
}

ElementMap push_forward(const Rect& r) {
  const double hx = r.hx(), hy = r.hy();
  if (!(hx > 0.0) || !(hy > 0.0)) {
    throw std::invalid_argument("push_forward: degenerate element");
  }
  return {2.0 / hx, 2.0 / hy, 0.25 * hx * hy, r.x0, r.y0, hx, hy};
}

FeSpace::FeSpace(TensorMesh2D mesh, int degree)
    : mesh_(std::move(mesh)), basis_(degree),
      node_x_(axis_nodes(mesh_.x_mesh(), degree)),
      node_y_(axis_nodes(mesh_.y_mesh(), degree)) {
  const int nx = nodes_x(), ny = nodes_y();
  for (int J = 0; J < ny; ++J) {
    for (int I = 0; I < nx; ++I) {
      if (I == 0 || J == 0 || I == nx - 1 || J == ny - 1) boundary_.push_back(node_index(I, J));
    }
  }
}

Point2 FeSpace::node_coordinate(int node) const {
  const int I = node % nodes_x();
  const int J = node / nodes_x();
  return {node_x_[static_cast<std::size_t>(I)], node_y_[static_cast<std::size_t>(J)]};
}

void FeSpace::element_nodes(int element, std::span<int> out) const {
  const auto [i, j] = mesh_.cell(element);
  const int p = degree();
  const int n = p + 1;
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      out[static_cast<std::size_t>(a + n * b)] = node_index(p * i + a, p * j + b);
    }
  }
}

FeSpace build_space(const TensorMesh2D& mesh, int degree) { return FeSpace(mesh, degree); }

std::vector<double> interpolate(const FeSpace& space,
                                const std::function<double(double, double)>& fn) {
  std::vector<double> out(static_cast<std::size_t>(space.n_per_field()));
  for (int k = 0; k < space.n_per_field(); ++k) {
    const Point2 x = space.node_coordinate(k);
    out[static_cast<std::size_t>(k)] = fn(x[0], x[1]);
  }
  return out;
}

double evaluate(const FeSpace& space, std::span<const double> nodal, const Point2& x) {
  const auto locate = [](const std::vector<double>& b, double v) {
    auto it = std::upper_bound(b.begin(), b.end(), v);
    int i = static_cast<int>(it - b.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(b.size()) - 2);
  };
  const TensorMesh2D& mesh = space.mesh();
  const int i = locate(mesh.x_mesh().breakpoints(), x[0]);
  const int j = locate(mesh.y_mesh().breakpoints(), x[1]);
  const int e = mesh.element(i, j);
  const Rect r = mesh.rect(e);
  const Point2 xi{2.0 * (x[0] - r.x0) / r.hx() - 1.0, 2.0 * (x[1] - r.y0) / r.hy() - 1.0};

  std::vector<int> nodes(static_cast<std::size_t>(space.n_local()));
  space.element_nodes(e, nodes);
  const BasisEval ev = space.basis().eval(xi);
  double s = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    s += nodal[static_cast<std::size_t>(nodes[k])] * ev.values[k];
  }
  return s;
}

} // namespace fosls
