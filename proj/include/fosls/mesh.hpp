#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace fosls {

/// Transition point of the piecewise-uniform layer mesh,
///   tau = min(1/2, (p+1) * sqrt(2 eps / b0) / gamma * ln N).
/// Throws std::invalid_argument for eps, b0, gamma <= 0, p < 1, or N odd / N < 4.
double transition_point(double epsilon, double b0, double gamma, int degree, int n_elements);

/// Piecewise-uniform (Shishkin) mesh of [0,1]: N/2 equal elements on the fine side
/// of the transition point and N/2 on the coarse side.
class ShishkinMesh1D {
public:
  ShishkinMesh1D(int n_elements, double tau, bool layer_at_zero = true);

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  int n_elements() const noexcept { return n_elements_; }
  double tau() const noexcept { return tau_; }
  bool layer_at_zero() const noexcept { return layer_at_zero_; }

  double left(int i) const { return breakpoints_[static_cast<std::size_t>(i)]; }
  double right(int i) const { return breakpoints_[static_cast<std::size_t>(i) + 1]; }
  double width(int i) const { return right(i) - left(i); }

private:
  std::vector<double> breakpoints_;
  double tau_;
  int n_elements_;
  bool layer_at_zero_;
};

ShishkinMesh1D build_shishkin_1d(int n_elements, double tau, bool layer_at_zero = true);

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
  double x0, x1, y0, y1;
  double hx() const noexcept { return x1 - x0; }
  double hy() const noexcept { return y1 - y0; }
  double area() const noexcept { return hx() * hy(); }
};

/// Tensor product of two 1D meshes. Elements are numbered lexicographically,
/// x fastest: element e <-> cell (i, j) with e = i + nx * j.
class TensorMesh2D {
public:
  TensorMesh2D(ShishkinMesh1D x_mesh, ShishkinMesh1D y_mesh);

  const ShishkinMesh1D& x_mesh() const noexcept { return x_; }
  const ShishkinMesh1D& y_mesh() const noexcept { return y_; }
  int nx() const noexcept { return x_.n_elements(); }
  int ny() const noexcept { return y_.n_elements(); }
  int n_elements() const noexcept { return nx() * ny(); }

  std::array<int, 2> cell(int element) const noexcept { return {element % nx(), element / nx()}; }
  int element(int i, int j) const noexcept { return i + nx() * j; }
  Rect rect(int element) const;

private:
  ShishkinMesh1D x_;
  ShishkinMesh1D y_;
};

TensorMesh2D tensor_mesh(const ShishkinMesh1D& x, const ShishkinMesh1D& y);

} // namespace fosls
