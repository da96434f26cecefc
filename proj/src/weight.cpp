#include "fosls/weight.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fosls {

namespace {

// Scaled layer term s = eps^{-1/2} exp(-gamma t / sqrt(eps)).
double layer_term(double epsilon, double gamma, double t) {
  const double se = std::sqrt(epsilon);
  return std::exp(-gamma * t / se) / se;
}

} // namespace

WeightSpec WeightSpec::from_gamma(double epsilon, double gamma, double b0, int dims) {
  if (!(epsilon > 0.0) || !(gamma > 0.0) || !(b0 > 0.0) || dims < 1 || dims > 2) {
    throw std::invalid_argument("WeightSpec: epsilon, gamma, b0 must be positive and d in {1,2}");
  }
  WeightSpec s;
  s.epsilon = epsilon;
  s.gamma = gamma;
  s.dims = dims;
  s.margin = std::sqrt(b0) / (gamma * std::sqrt(static_cast<double>(dims))) - 1.0;
  if (!(s.margin > 0.0)) {
    throw std::invalid_argument("WeightSpec: gamma too large, implied coercivity margin C <= 0");
  }
  if (dims == 1) s.layer_at_zero = {true, false};
  return s;
}

WeightSpec WeightSpec::from_margin(double epsilon, double margin, double b0, int dims) {
  if (!(epsilon > 0.0) || !(margin > 0.0) || !(b0 > 0.0) || dims < 1 || dims > 2) {
    throw std::invalid_argument("WeightSpec: epsilon, C, b0 must be positive and d in {1,2}");
  }
  WeightSpec s;
  s.epsilon = epsilon;
  s.margin = margin;
  s.dims = dims;
  s.gamma = std::sqrt(b0) / ((1.0 + margin) * std::sqrt(static_cast<double>(dims)));
  if (dims == 1) s.layer_at_zero = {true, false};
  return s;
}

WeightSpec WeightSpec::without_layers() const {
  WeightSpec s = *this;
  s.layer_at_zero = {false, false};
  s.layer_at_one = {false, false};
  return s;
}

double beta_factor(double epsilon, double gamma, double t) {
  return 1.0 + layer_term(epsilon, gamma, t);
}

double beta_eval(const WeightSpec& spec, const Point2& x) {
  double beta = 1.0;
  for (int a = 0; a < spec.dims; ++a) {
    if (spec.layer_at_zero[a]) beta *= beta_factor(spec.epsilon, spec.gamma, x[a]);
    if (spec.layer_at_one[a]) beta *= beta_factor(spec.epsilon, spec.gamma, 1.0 - x[a]);
  }
  return beta;
}

Point2 grad_beta(const WeightSpec& spec, const Point2& x) {
  // d/dt of a factor (1 + s(t)) is -(gamma / sqrt(eps)) s(t); the gradient of
  // the product is beta times the sum of the log-derivatives.
  const double beta = beta_eval(spec, x);
  const double rate = spec.gamma / std::sqrt(spec.epsilon);
  Point2 g{0.0, 0.0};
  for (int a = 0; a < spec.dims; ++a) {
    double logd = 0.0;
    if (spec.layer_at_zero[a]) {
      const double s = layer_term(spec.epsilon, spec.gamma, x[a]);
      logd -= rate * s / (1.0 + s);
    }
    if (spec.layer_at_one[a]) {
      const double s = layer_term(spec.epsilon, spec.gamma, 1.0 - x[a]);
      logd += rate * s / (1.0 + s);
    }
    g[a] = logd * beta;
  }
  return g;
}

std::vector<double> layer_refined_samples(const WeightSpec& spec, int axis, int count) {
  if (count < 4) throw std::invalid_argument("layer_refined_samples: need at least 4 samples");
  const bool lo = axis < spec.dims && spec.layer_at_zero[axis];
  const bool hi = axis < spec.dims && spec.layer_at_one[axis];
  // Layer decays like exp(-gamma t / sqrt(eps)); 40 decay lengths reach ~1e-17.
  const double width = std::min(0.25, 40.0 * std::sqrt(spec.epsilon) / spec.gamma);

  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(count));
  if (!lo && !hi) {
    for (int i = 0; i < count; ++i) pts.push_back(static_cast<double>(i) / (count - 1));
    return pts;
  }
  const int layers = (lo ? 1 : 0) + (hi ? 1 : 0);
  const int per_layer = count / (2 * layers);
  const int bulk = count - layers * per_layer;
  const double a = lo ? width : 0.0;
  const double b = hi ? 1.0 - width : 1.0;
  if (lo) {
    for (int i = 0; i < per_layer; ++i) pts.push_back(width * i / per_layer);
  }
  for (int i = 0; i < bulk; ++i) pts.push_back(a + (b - a) * i / (bulk - 1));
  if (hi) {
    for (int i = per_layer - 1; i >= 0; --i) pts.push_back(1.0 - width * i / per_layer);
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

std::vector<Point2> layer_refined_grid(const WeightSpec& spec, int per_axis) {
  const auto xs = layer_refined_samples(spec, 0, per_axis);
  const auto ys = layer_refined_samples(spec, 1, per_axis);
  std::vector<Point2> grid;
  grid.reserve(xs.size() * ys.size());
  for (double y : ys) {
    for (double x : xs) grid.push_back({x, y});
  }
  return grid;
}

WeightAudit audit_weight_bound(const WeightSpec& spec, double b0, const std::vector<Point2>& samples) {
  WeightAudit audit;
  const double scale = spec.epsilon * (1.0 + spec.margin) * (1.0 + spec.margin) / b0;
  for (const Point2& x : samples) {
    const double beta = beta_eval(spec, x);
    const Point2 g = grad_beta(spec, x);
    const double ratio = scale * (g[0] * g[0] + g[1] * g[1]) / (beta * beta);
    if (ratio > audit.max_ratio || audit.samples == 0) {
      audit.max_ratio = ratio;
      audit.argmax = x;
    }
    ++audit.samples;
  }
  return audit;
}

BalanceIntegrals balance_integrals(double gamma, double epsilon, double b0) {
  if (!(gamma > 0.0) || !(epsilon > 0.0) || !(b0 > 0.0)) {
    throw std::invalid_argument("balance_integrals: arguments must be positive");
  }
  const double se = std::sqrt(epsilon);
  const double r2b = std::sqrt(2.0 * b0);
  BalanceIntegrals out;
  out.weight = 1.0 - std::expm1(-gamma / se) / gamma;
  out.layer = -std::expm1(-(gamma + r2b) / se) / (gamma + r2b) -
              std::sqrt(epsilon / (2.0 * b0)) * std::expm1(-r2b / se);
  return out;
}

BalanceIntegrals balance_integrals_quadrature(double gamma, double epsilon, double b0,
                                              const ShishkinMesh1D& mesh, int points_per_element) {
  const QuadratureRule rule = gauss_rule(points_per_element);
  const double decay = 2.0 * std::sqrt(b0 / (2.0 * epsilon));
  BalanceIntegrals out;
  for (int i = 0; i < mesh.n_elements(); ++i) {
    const double h = mesh.width(i);
    double w_sum = 0.0, l_sum = 0.0;
    for (std::size_t q = 0; q < rule.points_1d.size(); ++q) {
      const double x = mesh.left(i) + 0.5 * (rule.points_1d[q] + 1.0) * h;
      const double b1 = beta_factor(epsilon, gamma, x);
      w_sum += rule.weights_1d[q] * b1;
      l_sum += rule.weights_1d[q] * b1 * std::exp(-decay * x);
    }
    out.weight += 0.5 * h * w_sum;
    out.layer += 0.5 * h * l_sum;
  }
  return out;
}

} // namespace fosls
