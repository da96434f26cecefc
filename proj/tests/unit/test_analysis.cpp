#include "check.hpp"

#include "fosls/analysis.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

using namespace fosls;

namespace {

StudySettings small_study(int degree = 1) {
  StudySettings s;
  s.epsilons = {1e-6};
  s.n_elements = {8};
  s.degree = degree;
  return s;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string sci3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

} // namespace

TEST_CASE("expected rates reproduce the tabulated values") {
  const std::array<int, 4> ns{64, 128, 256, 512};
  const std::array<std::array<double, 4>, 4> table{{{0.60, 0.58, 0.57, 0.56},
                                                    {0.36, 0.34, 0.33, 0.32},
                                                    {0.22, 0.20, 0.19, 0.18},
                                                    {0.13, 0.12, 0.11, 0.10}}};
  for (int m = 1; m <= 4; ++m) {
    for (std::size_t j = 0; j < ns.size(); ++j) {
      const int n = ns[j];
      const double oracle = std::pow(0.5 * std::log(n) / std::log(n / 2.0), m);
      CHECK_REL(expected_rate(m, n), oracle, 1e-14);
      CHECK(std::abs(expected_rate(m, n) - table[m - 1][j]) <= 0.005 + 1e-12);
    }
  }
}

TEST_CASE("reduction rates") {
  const std::vector<double> errs{3.086e-1, 1.921e-1};
  const auto r = reduction_rates(errs);
  REQUIRE(r.size() == 1);
  CHECK(std::abs(r[0] - 0.62) < 0.005);
  const std::vector<double> flat{2.0, 2.0, 2.0};
  CHECK(reduction_rates(flat) == std::vector<double>{1.0, 1.0});
  CHECK_THROWS_AS(reduction_rates(std::vector<double>{1.0}), std::invalid_argument);
  const std::vector<double> zero{0.0, 1.0};
  CHECK_THROWS_AS(reduction_rates(zero), std::domain_error);
}

TEST_CASE("interpolant of the exact solution has no nodal error") {
  const StudySettings s = small_study(2);
  const Discretization d = discretize(s, 1e-6, 8);
  const FoslsOperatorSpec spec = d.operator_spec(s);
  const SystemField interp = interpolate_exact(spec);
  const std::span<const double> u(interp.coefficients.data(), static_cast<std::size_t>(d.space.n_per_field()));
  CHECK(max_norm_error(d.space, u, *d.problem.exact) < 1e-15);
}

TEST_CASE("balanced-norm error is the root of its component sum") {
  const StudySettings s = small_study();
  const PipelineResult r = solve_pipeline(s, 1e-6, 8);
  const double sum = std::accumulate(r.report.components.begin(), r.report.components.end(), 0.0);
  CHECK_REL(r.report.beta_norm_error * r.report.beta_norm_error, sum, 1e-12);
  for (double c : r.report.components) CHECK(c >= 0.0);
}

TEST_CASE("balanced-norm error of the interpolant decreases under refinement") {
  double prev = INFINITY;
  for (int n : {8, 16, 32}) {
    const StudySettings s = small_study();
    const Discretization d = discretize(s, 1e-8, n);
    const FoslsOperatorSpec spec = d.operator_spec(s);
    const double e = beta_norm_error(spec, interpolate_exact(spec).coefficients).value;
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("error of the exact field vanishes for the zero problem") {
  StudySettings s = small_study();
  s.problem = ProblemKind::zero;
  const PipelineResult r = solve_pipeline(s, 1e-6, 8);
  CHECK(r.report.beta_norm_error == 0.0);
  CHECK(r.report.max_norm_error == 0.0);
}

TEST_CASE("one more Gauss point barely moves the measured error") {
  for (int p = 1; p <= 2; ++p) {
    const StudySettings s = small_study(p);
    const PipelineResult r = solve_pipeline(s, 1e-8, 16);
    const Discretization d = discretize(s, 1e-8, 16);
    const FoslsOperatorSpec spec = d.operator_spec(s);
    const double base = beta_norm_error(spec, r.solution.coefficients, 2).value;
    const double finer = beta_norm_error(spec, r.solution.coefficients, 3).value;
    CHECK(std::abs(finer - base) < 1e-3 * base);
  }
}

TEST_CASE("discrete solution has a smaller functional than the interpolant") {
  const StudySettings s = small_study();
  const Discretization d = discretize(s, 1e-8, 16);
  const FoslsOperatorSpec spec = d.operator_spec(s);
  const PipelineResult r = solve_pipeline(s, 1e-8, 16);
  CHECK(least_squares_functional(spec, r.solution.coefficients) <=
        least_squares_functional(spec, interpolate_exact(spec).coefficients));
}

TEST_CASE("errors are robust in eps") {
  StudySettings s = small_study();
  s.epsilons = {1e-6, 1e-8, 1e-10, 1e-12};
  s.n_elements = {16};
  const ConvergenceTable t = run_convergence_study(s);
  const double ref = t.at(3, 0).report.beta_norm_error;
  for (std::size_t ie = 0; ie < 4; ++ie) {
    REQUIRE(t.at(ie, 0).ok);
    CHECK(std::abs(t.at(ie, 0).report.beta_norm_error - ref) < 5e-3 * ref);
  }
}

TEST_CASE("a single-cell study reproduces the pipeline") {
  const StudySettings s = small_study();
  const ConvergenceTable t = run_convergence_study(s);
  REQUIRE(t.all_ok());
  const PipelineResult r = solve_pipeline(s, 1e-6, 8);
  CHECK(t.at(0, 0).report.beta_norm_error == r.report.beta_norm_error);
  CHECK(t.at(0, 0).report.max_norm_error == r.report.max_norm_error);
  CHECK(t.at(0, 0).report.dofs == 3 * 81);
  CHECK_FALSE(t.beta_rate(0, 0).has_value());
}

TEST_CASE("CSV and markdown agree and CSV is reproducible") {
  StudySettings s = small_study();
  s.epsilons = {1e-6, 1e-8};
  s.n_elements = {8, 16};
  const ConvergenceTable t = run_convergence_study(s);
  REQUIRE(t.all_ok());

  std::ostringstream c1, c2, md;
  write_csv(t, c1, false);
  write_csv(run_convergence_study(s), c2, false);
  CHECK(c1.str() == c2.str());
  write_markdown(t, md);

  const auto lines = split_lines(c1.str());
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "epsilon,N,p,beta_norm_err,beta_rate,max_norm_err,max_rate,iterations,solve_seconds");
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto f = split_fields(lines[k]);
    REQUIRE(f.size() == 9);
    const std::size_t ie = (k - 1) / 2, in = (k - 1) % 2;
    const ErrorReport& r = t.at(ie, in).report;
    CHECK(std::stod(f[0]) == t.epsilons()[ie]);
    CHECK(std::stoi(f[1]) == t.n_elements()[in]);
    CHECK(std::stod(f[3]) == r.beta_norm_error);
    CHECK(std::stod(f[5]) == r.max_norm_error);
    CHECK(f[8] == "0");
    if (in == 0) {
      CHECK(f[4].empty());
    } else {
      CHECK_REL(std::stod(f[4]), r.beta_norm_error / t.at(ie, 0).report.beta_norm_error, 1e-15);
      CHECK_REL(std::stod(f[6]), r.max_norm_error / t.at(ie, 0).report.max_norm_error, 1e-15);
    }
    CHECK(md.str().find(sci3(r.beta_norm_error)) != std::string::npos);
    CHECK(md.str().find(sci3(r.max_norm_error)) != std::string::npos);
  }
}

TEST_CASE("failed cells are reported rather than aborting the study") {
  StudySettings s = small_study();
  s.n_elements = {8, 16};
  s.solver = {SolverMethod::conjugate_gradient, 1e-14, 1};
  const ConvergenceTable t = run_convergence_study(s);
  CHECK_FALSE(t.all_ok());
  CHECK_FALSE(t.at(0, 0).ok);
  CHECK_FALSE(t.at(0, 0).failure.empty());
  std::ostringstream csv, md;
  write_csv(t, csv, false);
  write_markdown(t, md);
  CHECK(csv.str().find("failed") != std::string::npos);
  CHECK(md.str().find("FAILED") != std::string::npos);
}

TEST_CASE("study input validation") {
  StudySettings s;
  CHECK_THROWS_AS(run_convergence_study(s), std::invalid_argument);
}
