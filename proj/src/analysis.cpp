#include "fosls/analysis.hpp"

#include "fosls/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace fosls {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

NormComponents element_error(const FoslsOperatorSpec& spec, const QuadratureRule& rule,
                             const BasisTable& table, const OperatorCoefficients& c,
                             std::span<const double> field, int element, std::vector<int>& nodes) {
  const FeSpace& space = spec.space;
  const int n = space.n_local();
  const int per = space.n_per_field();
  const ElementMap map = push_forward(space.mesh().rect(element));
  space.element_nodes(element, nodes);

  NormComponents acc{};
  for (int q = 0; q < table.n_points; ++q) {
    const Point2 x = map.to_physical(rule.points[q]);
    const std::size_t off = static_cast<std::size_t>(q) * n;
    double u = 0, ux = 0, uy = 0, w1 = 0, w2 = 0, w1x = 0, w1y = 0, w2x = 0, w2y = 0;
    for (int a = 0; a < n; ++a) {
      const double phi = table.value[off + a];
      const double gx = table.d_xi[off + a] * map.scale_x;
      const double gy = table.d_eta[off + a] * map.scale_y;
      const double cu = field[nodes[a]];
      const double c1 = field[per + nodes[a]];
      const double c2 = field[2 * per + nodes[a]];
      u += cu * phi;
      ux += cu * gx;
      uy += cu * gy;
      w1 += c1 * phi;
      w2 += c2 * phi;
      w1x += c1 * gx;
      w1y += c1 * gy;
      w2x += c2 * gx;
      w2y += c2 * gy;
    }
    const ExactFields ex = eval_exact_fields(spec.problem, x, spec.rescaled);
    const double wt = rule.weights[q] * map.measure * beta_eval(spec.weight, x);
    const double eu = ex.u - u;
    const double ex_ = ex.grad_u[0] - ux, ey = ex.grad_u[1] - uy;
    const double e1 = ex.flux[0] - w1, e2 = ex.flux[1] - w2;
    const double ediv = ex.div_flux - (w1x + w2y);
    const double ecurl = w2x - w1y; // exact flux is a gradient: curl vanishes
    acc[0] += wt * eu * eu;
    acc[1] += wt * c.grad_u * c.grad_u * (ex_ * ex_ + ey * ey);
    acc[2] += wt * c.flux * c.flux * (e1 * e1 + e2 * e2);
    acc[3] += wt * c.div * c.div * ediv * ediv;
    acc[4] += wt * c.curl * c.curl * ecurl * ecurl;
  }
  return acc;
}

} // namespace

BetaNormError beta_norm_error(const FoslsOperatorSpec& spec, std::span<const double> field,
                              int extra_points, Execution exec) {
  if (!spec.problem.exact) throw UnsupportedOperation("beta_norm_error needs an exact solution");
  if (static_cast<int>(field.size()) != spec.space.n_total()) {
    throw std::invalid_argument("beta_norm_error: field length does not match space");
  }
  const int q = std::min(12, spec.quadrature_points() + std::max(0, extra_points));
  const QuadratureRule rule = gauss_rule(q);
  const BasisTable table = tabulate(spec.space.basis(), rule);
  const OperatorCoefficients c = operator_coefficients(spec.problem.epsilon, spec.k, spec.rescaled);
  const int ne = spec.space.mesh().n_elements();

  std::vector<NormComponents> per_element(static_cast<std::size_t>(ne));
  if (exec == Execution::parallel) {
#pragma omp parallel
    {
      std::vector<int> nodes(static_cast<std::size_t>(spec.space.n_local()));
#pragma omp for schedule(static)
      for (int e = 0; e < ne; ++e) per_element[e] = element_error(spec, rule, table, c, field, e, nodes);
    }
  } else {
    std::vector<int> nodes(static_cast<std::size_t>(spec.space.n_local()));
    for (int e = 0; e < ne; ++e) per_element[e] = element_error(spec, rule, table, c, field, e, nodes);
  }

  BetaNormError out;
  for (const auto& pe : per_element) {
    for (std::size_t k = 0; k < pe.size(); ++k) out.components[k] += pe[k];
  }
  double total = 0.0;
  for (double v : out.components) total += v;
  out.value = std::sqrt(total);
  return out;
}

double max_norm_error(const FeSpace& space, std::span<const double> u_nodal, const ExactSolution& exact) {
  double worst = 0.0;
  for (int k = 0; k < space.n_per_field(); ++k) {
    const double d = std::abs(exact.value(space.node_coordinate(k)) - u_nodal[k]);
    worst = std::max(worst, d);
  }
  return worst;
}

std::vector<double> reduction_rates(std::span<const double> errors) {
  if (errors.size() < 2) throw std::invalid_argument("reduction_rates: need at least two errors");
  std::vector<double> out;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    if (errors[i - 1] == 0.0) throw std::domain_error("reduction_rates: zero error in denominator");
    out.push_back(errors[i] / errors[i - 1]);
  }
  return out;
}

double expected_rate(int power, int n) {
  if (power < 1 || power > 4) throw std::invalid_argument("expected_rate: power must be in 1..4");
  if (n < 4) throw std::invalid_argument("expected_rate: N must be >= 4");
  const double fine = std::log(static_cast<double>(n)) / n;
  const double coarse = std::log(0.5 * n) / (0.5 * n);
  return std::pow(fine / coarse, power);
}

ProblemSpec make_problem(ProblemKind kind, double epsilon) {
  return kind == ProblemKind::zero ? zero_problem(epsilon) : manufactured_problem(epsilon);
}

Discretization discretize(const StudySettings& s, double epsilon, int n) {
  ProblemSpec problem = make_problem(s.problem, epsilon);
  WeightSpec weight = WeightSpec::from_gamma(epsilon, s.gamma, problem.b0, 2);
  weight.layer_at_zero = problem.layer_at_zero;
  weight.layer_at_one = problem.layer_at_one;

  auto axis = [&](int a) {
    const bool lo = problem.layer_at_zero[a];
    const bool hi = problem.layer_at_one[a];
    const double tau = (lo || hi) ? transition_point(epsilon, problem.b0, s.gamma, s.degree, n) : 0.5;
    return build_shishkin_1d(n, tau, lo || !hi);
  };
  FeSpace space = build_space(tensor_mesh(axis(0), axis(1)), s.degree);
  return {std::move(problem), weight, std::move(space)};
}

PipelineResult solve_pipeline(const StudySettings& s, double epsilon, int n) {
  const Discretization d = discretize(s, epsilon, n);
  const FoslsOperatorSpec spec = d.operator_spec(s);

  auto t0 = Clock::now();
  const AssembledSystem sys = assemble_system(spec);
  const double t_asm = seconds_since(t0);

  t0 = Clock::now();
  SolveResult sol = solve_spd(sys.matrix, sys.rhs, s.solver);
  const double t_solve = seconds_since(t0);

  PipelineResult out;
  out.solution.coefficients = std::move(sol.solution);
  const BetaNormError be = beta_norm_error(spec, out.solution.coefficients, s.error_extra_points);

  ErrorReport& r = out.report;
  r.epsilon = epsilon;
  r.n_elements = n;
  r.degree = s.degree;
  r.beta_norm_error = be.value;
  r.components = be.components;
  r.max_norm_error = max_norm_error(d.space, out.solution.field(d.space, Field::u), *d.problem.exact);
  r.iterations = sol.iterations;
  r.relative_residual = sol.relative_residual;
  r.assemble_seconds = t_asm;
  r.solve_seconds = t_solve;
  r.dofs = d.space.n_total();
  return out;
}

ConvergenceTable::ConvergenceTable(std::vector<double> epsilons, std::vector<int> n_elements, int degree)
    : eps_(std::move(epsilons)), ns_(std::move(n_elements)), degree_(degree),
      cells_(eps_.size() * ns_.size()) {}

std::optional<double> ConvergenceTable::rate(std::size_t ie, std::size_t in,
                                             double ErrorReport::*member) const {
  if (in == 0 || ns_[in] != 2 * ns_[in - 1]) return std::nullopt;
  const StudyCell& cur = at(ie, in);
  const StudyCell& prev = at(ie, in - 1);
  if (!cur.ok || !prev.ok || prev.report.*member == 0.0) return std::nullopt;
  return cur.report.*member / prev.report.*member;
}

std::optional<double> ConvergenceTable::beta_rate(std::size_t ie, std::size_t in) const {
  return rate(ie, in, &ErrorReport::beta_norm_error);
}

std::optional<double> ConvergenceTable::max_rate(std::size_t ie, std::size_t in) const {
  return rate(ie, in, &ErrorReport::max_norm_error);
}

bool ConvergenceTable::all_ok() const {
  return std::all_of(cells_.begin(), cells_.end(), [](const StudyCell& c) { return c.ok; });
}

ConvergenceTable run_convergence_study(const StudySettings& s) {
  if (s.epsilons.empty() || s.n_elements.empty()) {
    throw std::invalid_argument("convergence study needs at least one epsilon and one N");
  }
  ConvergenceTable table(s.epsilons, s.n_elements, s.degree);
  for (std::size_t ie = 0; ie < s.epsilons.size(); ++ie) {
    for (std::size_t in = 0; in < s.n_elements.size(); ++in) {
      StudyCell& cell = table.at(ie, in);
      try {
        cell.report = solve_pipeline(s, s.epsilons[ie], s.n_elements[in]).report;
        cell.ok = true;
      } catch (const ConvergenceFailure& e) {
        cell.failure = e.what();
      } catch (const NumericalBreakdown& e) {
        cell.failure = e.what();
      }
      cell.report.epsilon = s.epsilons[ie];
      cell.report.n_elements = s.n_elements[in];
      cell.report.degree = s.degree;
    }
  }
  return table;
}

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

} // namespace

void write_csv(const ConvergenceTable& t, std::ostream& out, bool timing) {
  out << "epsilon,N,p,beta_norm_err,beta_rate,max_norm_err,max_rate,iterations,solve_seconds\n";
  for (std::size_t ie = 0; ie < t.epsilons().size(); ++ie) {
    for (std::size_t in = 0; in < t.n_elements().size(); ++in) {
      const StudyCell& c = t.at(ie, in);
      out << fmt("%.17g", t.epsilons()[ie]) << ',' << t.n_elements()[in] << ',' << t.degree() << ',';
      if (!c.ok) {
        out << "failed,,failed,,,\n";
        continue;
      }
      const auto br = t.beta_rate(ie, in);
      const auto mr = t.max_rate(ie, in);
      out << fmt("%.17g", c.report.beta_norm_error) << ',' << (br ? fmt("%.17g", *br) : "") << ','
          << fmt("%.17g", c.report.max_norm_error) << ',' << (mr ? fmt("%.17g", *mr) : "") << ','
          << c.report.iterations << ',' << (timing ? fmt("%.6f", c.report.solve_seconds) : "0")
          << '\n';
    }
  }
}

void write_markdown(const ConvergenceTable& t, std::ostream& out) {
  auto block = [&](const char* title, double ErrorReport::*member, bool beta) {
    out << "| " << title;
    for (std::size_t in = 0; in < t.n_elements().size(); ++in) out << " | N=" << t.n_elements()[in];
    out << " |\n|---";
    for (std::size_t in = 0; in < t.n_elements().size(); ++in) out << "|---";
    out << "|\n";
    for (std::size_t ie = 0; ie < t.epsilons().size(); ++ie) {
      out << "| " << fmt("%.0e", t.epsilons()[ie]);
      for (std::size_t in = 0; in < t.n_elements().size(); ++in) {
        const StudyCell& c = t.at(ie, in);
        out << " | ";
        if (!c.ok) {
          out << "FAILED";
          continue;
        }
        out << fmt("%.3e", c.report.*member);
        const auto r = beta ? t.beta_rate(ie, in) : t.max_rate(ie, in);
        if (r) out << " (" << fmt("%.2f", *r) << ")";
      }
      out << " |\n";
    }
  };
  out << "p = " << t.degree() << "\n\n";
  block("beta-norm error, eps / N", &ErrorReport::beta_norm_error, true);
  out << '\n';
  block("max-norm error, eps / N", &ErrorReport::max_norm_error, false);
}

} // namespace fosls
