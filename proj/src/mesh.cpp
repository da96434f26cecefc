#include "fosls/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fosls {

namespace {

void check_element_count(int n) {
  if (n < 4 || n % 2 != 0) {
    throw std::invalid_argument("element count must be even and >= 4, got " + std::to_string(n));
  }
}

} // namespace

double transition_point(double epsilon, double b0, double gamma, int degree, int n_elements) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("transition_point: epsilon must be positive");
  if (!(b0 > 0.0)) throw std::invalid_argument("transition_point: b0 must be positive");
  if (!(gamma > 0.0)) throw std::invalid_argument("transition_point: gamma must be positive");
  if (degree < 1) throw std::invalid_argument("transition_point: degree must be >= 1");
  check_element_count(n_elements);

  const double layer = (degree + 1) * std::sqrt(2.0 * epsilon / b0) / gamma *
                       std::log(static_cast<double>(n_elements));
  return std::min(0.5, layer);
}

ShishkinMesh1D::ShishkinMesh1D(int n_elements, double tau, bool layer_at_zero)
    : tau_(tau), n_elements_(n_elements), layer_at_zero_(layer_at_zero) {
  check_element_count(n_elements);
  if (!(tau > 0.0 && tau <= 0.5)) {
    throw std::invalid_argument("transition point must lie in (0, 1/2]");
  }

  const int half = n_elements / 2;
  const double fine = 2.0 * tau / n_elements;
  const double coarse = 2.0 * (1.0 - tau) / n_elements;

  std::vector<double> b(static_cast<std::size_t>(n_elements) + 1);
  b[0] = 0.0;
  for (int i = 1; i <= half; ++i) b[i] = b[i - 1] + fine;
  b[half] = tau;
  for (int i = half + 1; i <= n_elements; ++i) b[i] = b[i - 1] + coarse;
  b[n_elements] = 1.0;

  if (!layer_at_zero) {
    std::reverse(b.begin(), b.end());
    for (double& v : b) v = 1.0 - v;
    b.front() = 0.0;
    b.back() = 1.0;
  }
  breakpoints_ = std::move(b);
}

ShishkinMesh1D build_shishkin_1d(int n_elements, double tau, bool layer_at_zero) {
  return ShishkinMesh1D(n_elements, tau, layer_at_zero);
}

TensorMesh2D::TensorMesh2D(ShishkinMesh1D x_mesh, ShishkinMesh1D y_mesh)
    : x_(std::move(x_mesh)), y_(std::move(y_mesh)) {}

Rect TensorMesh2D::rect(int element) const {
  const auto [i, j] = cell(element);
  return {x_.left(i), x_.right(i), y_.left(j), y_.right(j)};
}

TensorMesh2D tensor_mesh(const ShishkinMesh1D& x, const ShishkinMesh1D& y) {
  return TensorMesh2D(x, y);
}

} // namespace fosls
