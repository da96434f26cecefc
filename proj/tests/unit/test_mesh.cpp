#include "check.hpp"

#include "fosls/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

using namespace fosls;

namespace {

// Evaluated in long double as an independent check of the double formula.
long double tau_oracle(long double eps, long double b0, long double gamma, int p, int n) {
  const long double t = (p + 1) * std::sqrt(2.0L * eps / b0) / gamma * std::log(static_cast<long double>(n));
  return std::min(0.5L, t);
}

// Neumaier-compensated so the check sees mesh error, not summation error.
double total_area(const TensorMesh2D& m) {
  double s = 0.0, c = 0.0;
  for (int e = 0; e < m.n_elements(); ++e) {
    const double a = m.rect(e).area();
    const double t = s + a;
    c += std::abs(s) >= std::abs(a) ? (s - t) + a : (a - t) + s;
    s = t;
  }
  return s + c;
}

} // namespace

TEST_CASE("transition point clamps to one half for large eps") {
  CHECK(transition_point(1.0, 1.0, 0.5, 1, 32) == 0.5);
}

TEST_CASE("transition point matches extended-precision evaluation") {
  const double t1 = transition_point(1e-8, 1.0, 0.5, 1, 32);
  const double t3 = transition_point(1e-8, 1.0, 0.5, 3, 32);
  CHECK_REL(t1, static_cast<double>(tau_oracle(1e-8L, 1, 0.5L, 1, 32)), 1e-14);
  CHECK_REL(t1, 1.9604e-3, 1e-4);
  CHECK_REL(t3, 3.9208e-3, 1e-4);
  CHECK_REL(t3, 2.0 * t1, 1e-15);
}

TEST_CASE("transition point rejects invalid input") {
  CHECK_THROWS_AS(transition_point(0.0, 1.0, 0.5, 1, 32), std::invalid_argument);
  CHECK_THROWS_AS(transition_point(1e-4, -1.0, 0.5, 1, 32), std::invalid_argument);
  CHECK_THROWS_AS(transition_point(1e-4, 1.0, 0.0, 1, 32), std::invalid_argument);
  CHECK_THROWS_AS(transition_point(1e-4, 1.0, 0.5, 0, 32), std::invalid_argument);
  CHECK_THROWS_AS(transition_point(1e-4, 1.0, 0.5, 1, 31), std::invalid_argument);
  CHECK_THROWS_AS(transition_point(1e-4, 1.0, 0.5, 1, 2), std::invalid_argument);
}

TEST_CASE("transition point is nondecreasing in eps, p and N") {
  double prev = 0.0;
  for (double eps : {1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1.0}) {
    const double t = transition_point(eps, 1.0, 0.5, 1, 64);
    CHECK(t >= prev);
    prev = t;
  }
  prev = 0.0;
  for (int p = 1; p <= 3; ++p) {
    const double t = transition_point(1e-6, 1.0, 0.5, p, 64);
    CHECK(t >= prev);
    prev = t;
  }
  prev = 0.0;
  for (int n = 4; n <= 1024; n *= 2) {
    const double t = transition_point(1e-6, 1.0, 0.5, 2, n);
    CHECK(t >= prev);
    prev = t;
  }
}

TEST_CASE("shishkin mesh examples") {
  SUBCASE("N=4, tau=0.25") {
    const auto m = build_shishkin_1d(4, 0.25);
    const std::vector<double> expect{0.0, 0.125, 0.25, 0.625, 1.0};
    REQUIRE(m.breakpoints().size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK_REL(m.breakpoints()[i], expect[i], 1e-15);
  }
  SUBCASE("tau = 1/2 is uniform") {
    const auto m = build_shishkin_1d(4, 0.5);
    for (int i = 0; i <= 4; ++i) CHECK_REL(m.breakpoints()[i], 0.25 * i, 1e-15);
  }
  SUBCASE("N=8, tau=0.1") {
    const auto m = build_shishkin_1d(8, 0.1);
    const std::vector<double> expect{0, 0.025, 0.05, 0.075, 0.1, 0.325, 0.55, 0.775, 1.0};
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK_REL(m.breakpoints()[i], expect[i], 1e-14);
  }
}

TEST_CASE("shishkin mesh invariants") {
  for (int n : {4, 8, 16, 64, 256}) {
    for (double tau : {1e-7, 1e-3, 0.1, 0.3, 0.5}) {
      const auto m = build_shishkin_1d(n, tau);
      const auto& b = m.breakpoints();
      REQUIRE(b.size() == static_cast<std::size_t>(n + 1));
      CHECK(b.front() == 0.0);
      CHECK(b.back() == 1.0);
      CHECK(b[n / 2] == tau);
      for (int i = 0; i < n; ++i) CHECK(b[i + 1] > b[i]);
      for (int i = 0; i < n / 2; ++i) CHECK_REL(m.width(i), 2 * tau / n, 1e-9);
      for (int i = n / 2; i < n; ++i) CHECK_REL(m.width(i), 2 * (1 - tau) / n, 1e-9);
    }
  }
}

TEST_CASE("mirrored mesh is the reflection of the layer-at-zero mesh") {
  for (double tau : {0.01, 0.2, 0.5}) {
    const auto a = build_shishkin_1d(16, tau, true);
    const auto b = build_shishkin_1d(16, tau, false);
    for (int i = 0; i <= 16; ++i) CHECK_REL(b.breakpoints()[i], 1.0 - a.breakpoints()[16 - i], 1e-15);
    CHECK_REL(b.width(15), 2 * tau / 16, 1e-9);
  }
}

TEST_CASE("shishkin mesh rejects invalid input") {
  CHECK_THROWS_AS(build_shishkin_1d(5, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(build_shishkin_1d(2, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(build_shishkin_1d(8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_shishkin_1d(8, 0.6), std::invalid_argument);
}

TEST_CASE("tensor mesh indexing and partition") {
  const auto x = build_shishkin_1d(4, 0.25);
  const auto m = tensor_mesh(x, x);
  CHECK(m.n_elements() == 16);
  const Rect r0 = m.rect(0);
  CHECK(r0.x0 == 0.0);
  CHECK(r0.x1 == 0.125);
  CHECK(r0.y0 == 0.0);
  CHECK(r0.y1 == 0.125);
  const Rect r5 = m.rect(5);
  CHECK(r5.x0 == 0.125);
  CHECK(r5.y0 == 0.125);
  CHECK(m.element(1, 1) == 5);
  CHECK(m.cell(7) == std::array<int, 2>{3, 1});
  CHECK_REL(total_area(m), 1.0, 1e-14);

  const auto y = build_shishkin_1d(8, 0.1);
  const auto m2 = tensor_mesh(x, y);
  CHECK(m2.n_elements() == 32);
  CHECK(std::abs(total_area(m2) - 1.0) < 1e-14);
  for (int e = 0; e < m2.n_elements(); ++e) CHECK(m2.rect(e).area() > 0.0);
}

TEST_CASE("tensor mesh partitions the square for layer-scale transition points") {
  for (double eps : {1e-4, 1e-8, 1e-12}) {
    const double tau = transition_point(eps, 1.0, 0.5, 2, 128);
    const auto x = build_shishkin_1d(128, tau);
    const auto m = tensor_mesh(x, build_shishkin_1d(128, tau, false));
    CHECK(std::abs(total_area(m) - 1.0) < 1e-14);
  }
}
