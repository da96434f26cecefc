#include "fosls/problem.hpp"

#include "fosls/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fosls {

LayerProfile layer_profile(double epsilon, double t) {
  const double se = std::sqrt(epsilon);
  // 1 - e^{-1/sqrt(eps)}, -> 1 as eps -> 0
  const double denom = -std::expm1(-1.0 / se);
  const double decay = std::exp(-t / se);
  // e^{-t/se} - e^{-1/se} = e^{-t/se} (1 - e^{-(1-t)/se})
  const double value = -decay * std::expm1(-(1.0 - t) / se) / denom;
  const double d1 = -(decay / se) / denom;
  const double d2 = (decay / epsilon) / denom;
  return {value, d1, d2};
}

ProblemSpec manufactured_problem(double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("manufactured_problem: epsilon must be positive");

  struct Factors {
    double g, dg, ddg, h, dh, ddh;
  };
  auto factors = [epsilon](const Point2& x) {
    constexpr double half_pi = 0.5 * std::numbers::pi;
    const LayerProfile px = layer_profile(epsilon, x[0]);
    const LayerProfile py = layer_profile(epsilon, x[1]);
    const double c = std::cos(half_pi * x[0]);
    const double s = std::sin(half_pi * x[0]);
    return Factors{c - px.value,
                   -half_pi * s - px.d1,
                   -half_pi * half_pi * c - px.d2,
                   1.0 - x[1] - py.value,
                   -1.0 - py.d1,
                   -py.d2};
  };

  ProblemSpec p;
  p.epsilon = epsilon;
  p.reaction = [](const Point2&) { return 1.0; };
  p.b0 = 1.0;
  p.b1 = 1.0;
  p.layer_at_zero = {true, true};

  ExactSolution ex;
  ex.value = [factors](const Point2& x) {
    const Factors f = factors(x);
    return f.g * f.h;
  };
  ex.gradient = [factors](const Point2& x) {
    const Factors f = factors(x);
    return Point2{f.dg * f.h, f.g * f.dh};
  };
  ex.laplacian = [factors](const Point2& x) {
    const Factors f = factors(x);
    return f.ddg * f.h + f.g * f.ddh;
  };
  p.source = [factors, epsilon](const Point2& x) {
    const Factors f = factors(x);
    return -epsilon * (f.ddg * f.h + f.g * f.ddh) + f.g * f.h;
  };
  p.exact = std::move(ex);
  return p;
}

ProblemSpec zero_problem(double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("zero_problem: epsilon must be positive");
  ProblemSpec p;
  p.epsilon = epsilon;
  p.reaction = [](const Point2&) { return 1.0; };
  p.source = [](const Point2&) { return 0.0; };
  p.exact = ExactSolution{[](const Point2&) { return 0.0; },
                          [](const Point2&) { return Point2{0.0, 0.0}; },
                          [](const Point2&) { return 0.0; }};
  return p;
}

ExactFields eval_exact_fields(const ProblemSpec& problem, const Point2& x, bool rescaled) {
  if (!problem.exact) throw UnsupportedOperation("problem has no exact solution");
  const ExactSolution& ex = *problem.exact;
  const double scale = rescaled ? std::sqrt(problem.epsilon) : 1.0;
  const Point2 g = ex.gradient(x);
  return {ex.value(x), g, {scale * g[0], scale * g[1]}, scale * ex.laplacian(x)};
}

CoefficientAudit audit_reaction_bounds(const ProblemSpec& problem, int n) {
  CoefficientAudit a{INFINITY, -INFINITY, true};
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double b = problem.reaction({static_cast<double>(i) / (n - 1),
                                         static_cast<double>(j) / (n - 1)});
      a.min_b = std::min(a.min_b, b);
      a.max_b = std::max(a.max_b, b);
    }
  }
  a.within_bounds = problem.b0 > 0.0 && a.min_b >= problem.b0 && a.max_b <= problem.b1;
  return a;
}

} // namespace fosls
