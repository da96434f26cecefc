#include "fosls/cli.hpp"

#include "fosls/errors.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <random>

namespace fosls::cli {

namespace {

const std::map<std::string, Command> kCommands{
    {"study", Command::study},
    {"audit-weight", Command::audit_weight},
    {"audit-balance", Command::audit_balance},
    {"solve-once", Command::solve_once},
    {"export-matrix", Command::export_matrix},
};

const std::map<std::string, SolverMethod> kSolvers{
    {"cg", SolverMethod::conjugate_gradient},
    {"direct", SolverMethod::sparse_direct},
    {"dense", SolverMethod::dense},
};

const std::map<std::string, Preconditioner> kPreconditioners{
    {"none", Preconditioner::none},
    {"diagonal", Preconditioner::diagonal},
};

const std::map<std::string, OutputFormat> kFormats{
    {"csv", OutputFormat::csv},
    {"markdown", OutputFormat::markdown},
};

const std::map<std::string, ProblemKind> kProblems{
    {"manufactured", ProblemKind::manufactured},
    {"zero", ProblemKind::zero},
};

const std::map<std::string, MatrixKind> kMatrices{
    {"system", MatrixKind::system},
    {"gram", MatrixKind::gram},
};

constexpr const char* kFooter =
    "Config file: `key = value` lines using the long option names, # starts a comment.\n"
    "Command-line flags override file values.\n"
    "Exit status: 0 success, 2 usage error, 3 solver failure, 4 threshold violation.";

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void validate(const RunConfig& c) {
  if (c.epsilons.empty()) throw UsageError("--epsilon: at least one value required");
  if (c.n_elements.empty()) throw UsageError("--N: at least one value required");
  for (double e : c.epsilons) {
    if (!(e > 0.0) || !std::isfinite(e)) throw UsageError("--epsilon: values must be positive");
  }
  for (int n : c.n_elements) {
    if (n < 4 || n % 2 != 0) throw UsageError("--N: values must be even and at least 4");
  }
  if (!(c.gamma > 0.0)) throw UsageError("--gamma: must be positive");
  try {
    c.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

/// Sink that is either stdout or the --output file.
class Sink {
public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw UsageError("cannot open output file " + path);
    out_ = &file_;
  }
  std::ostream& get() { return *out_; }

private:
  std::ofstream file_;
  std::ostream* out_;
};

int run_study(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ConvergenceTable table = run_convergence_study(c.study_settings());
  Sink sink(c.output, out);
  if (c.format == OutputFormat::csv) {
    write_csv(table, sink.get(), c.timing);
  } else {
    write_markdown(table, sink.get());
  }

  int status = exit_code::ok;
  bool over = false;
  for (std::size_t ie = 0; ie < table.epsilons().size(); ++ie) {
    for (std::size_t in = 0; in < table.n_elements().size(); ++in) {
      const StudyCell& cell = table.at(ie, in);
      if (!cell.ok) {
        err << "cell eps=" << fmt("%g", table.epsilons()[ie]) << " N=" << table.n_elements()[in]
            << " failed: " << cell.failure << '\n';
        status = exit_code::solver_failure;
      } else if (c.max_error > 0.0 && cell.report.beta_norm_error > c.max_error) {
        over = true;
      }
    }
  }
  if (status == exit_code::ok && over) {
    err << "balanced-norm error above --max-error " << fmt("%g", c.max_error) << '\n';
    status = exit_code::threshold;
  }
  return status;
}

int run_audit_weight(const RunConfig& c, std::ostream& out, std::ostream& err) {
  constexpr double b0 = 1.0;
  Sink sink(c.output, out);
  std::ostream& o = sink.get();
  if (c.format == OutputFormat::csv) {
    o << "epsilon,gamma,C,max_ratio,argmax_x,argmax_y,samples\n";
  } else {
    o << "| eps | gamma | C | max ratio | argmax | samples |\n|---|---|---|---|---|---|\n";
  }

  bool violated = false;
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double eps : c.epsilons) {
    WeightSpec spec;
    try {
      spec = WeightSpec::from_gamma(eps, c.gamma, b0, 2);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    std::vector<Point2> samples = layer_refined_grid(spec, c.samples_per_axis);
    for (int i = 0; i < c.random_samples; ++i) samples.push_back({unit(rng), unit(rng)});
    const WeightAudit a = audit_weight_bound(spec, b0, samples);
    violated = violated || !(a.max_ratio < 1.0);
    if (c.format == OutputFormat::csv) {
      o << fmt("%.17g", eps) << ',' << fmt("%.17g", spec.gamma) << ',' << fmt("%.17g", spec.margin) << ','
        << fmt("%.17g", a.max_ratio) << ',' << fmt("%.17g", a.argmax[0]) << ','
        << fmt("%.17g", a.argmax[1]) << ',' << a.samples << '\n';
    } else {
      o << "| " << fmt("%.0e", eps) << " | " << fmt("%.3g", spec.gamma) << " | " << fmt("%.4f", spec.margin)
        << " | " << fmt("%.6f", a.max_ratio) << " | (" << fmt("%.3e", a.argmax[0]) << ", "
        << fmt("%.3e", a.argmax[1]) << ") | " << a.samples << " |\n";
    }
  }
  if (violated) {
    err << "weight bound violated: ratio >= 1\n";
    return exit_code::threshold;
  }
  return exit_code::ok;
}

int run_audit_balance(const RunConfig& c, std::ostream& out, std::ostream& err) {
  constexpr double b0 = 1.0;
  Sink sink(c.output, out);
  std::ostream& o = sink.get();
  if (c.format == OutputFormat::csv) {
    o << "epsilon,N,weight_exact,weight_quadrature,weight_rel_err,layer_exact,layer_quadrature,layer_rel_err\n";
  } else {
    o << "| eps | N | int beta | rel err | int beta layer^2 | rel err |\n|---|---|---|---|---|---|\n";
  }

  bool violated = false;
  for (double eps : c.epsilons) {
    const BalanceIntegrals exact = balance_integrals(c.gamma, eps, b0);
    for (int n : c.n_elements) {
      const double tau = transition_point(eps, b0, c.gamma, c.degree, n);
      const BalanceIntegrals quad =
          balance_integrals_quadrature(c.gamma, eps, b0, build_shishkin_1d(n, tau), c.balance_points);
      const double ew = std::abs(quad.weight - exact.weight) / std::abs(exact.weight);
      const double el = std::abs(quad.layer - exact.layer) / std::abs(exact.layer);
      violated = violated || !(ew <= c.balance_tolerance) || !(el <= c.balance_tolerance);
      if (c.format == OutputFormat::csv) {
        o << fmt("%.17g", eps) << ',' << n << ',' << fmt("%.17g", exact.weight) << ','
          << fmt("%.17g", quad.weight) << ',' << fmt("%.3e", ew) << ',' << fmt("%.17g", exact.layer) << ','
          << fmt("%.17g", quad.layer) << ',' << fmt("%.3e", el) << '\n';
      } else {
        o << "| " << fmt("%.0e", eps) << " | " << n << " | " << fmt("%.10f", exact.weight) << " | "
          << fmt("%.3e", ew) << " | " << fmt("%.10f", exact.layer) << " | " << fmt("%.3e", el) << " |\n";
      }
    }
  }
  if (violated) {
    err << "balance quadrature differs from closed form by more than " << fmt("%g", c.balance_tolerance)
        << '\n';
    return exit_code::threshold;
  }
  return exit_code::ok;
}

int run_solve_once(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const double eps = c.epsilons.front();
  const int n = c.n_elements.front();
  PipelineResult res;
  try {
    res = solve_pipeline(c.study_settings(), eps, n);
  } catch (const ConvergenceFailure& e) {
    err << "solver failed: " << e.what() << " (residual " << fmt("%.3e", e.achieved_residual()) << ")\n";
    return exit_code::solver_failure;
  } catch (const NumericalBreakdown& e) {
    err << "solver failed: " << e.what() << '\n';
    return exit_code::solver_failure;
  }

  const ErrorReport& r = res.report;
  Sink sink(c.output, out);
  std::ostream& o = sink.get();
  const char* names[] = {"mass_u", "grad_u", "mass_flux", "div_flux", "curl_flux"};
  if (c.format == OutputFormat::csv) {
    o << "epsilon,N,p,dofs,beta_norm_err,max_norm_err,mass_u,grad_u,mass_flux,div_flux,curl_flux,"
         "iterations,relative_residual,assemble_seconds,solve_seconds\n";
    o << fmt("%.17g", r.epsilon) << ',' << r.n_elements << ',' << r.degree << ',' << r.dofs << ','
      << fmt("%.17g", r.beta_norm_error) << ',' << fmt("%.17g", r.max_norm_error);
    for (double v : r.components) o << ',' << fmt("%.17g", v);
    o << ',' << r.iterations << ',' << fmt("%.3e", r.relative_residual) << ','
      << (c.timing ? fmt("%.6f", r.assemble_seconds) : "0") << ','
      << (c.timing ? fmt("%.6f", r.solve_seconds) : "0") << '\n';
  } else {
    o << "| quantity | value |\n|---|---|\n";
    o << "| eps | " << fmt("%.0e", r.epsilon) << " |\n| N | " << r.n_elements << " |\n| p | " << r.degree
      << " |\n| dofs | " << r.dofs << " |\n";
    o << "| beta-norm error | " << fmt("%.3e", r.beta_norm_error) << " |\n";
    o << "| max-norm error | " << fmt("%.3e", r.max_norm_error) << " |\n";
    for (std::size_t i = 0; i < r.components.size(); ++i) {
      o << "| " << names[i] << " | " << fmt("%.3e", r.components[i]) << " |\n";
    }
    o << "| iterations | " << r.iterations << " |\n";
    o << "| relative residual | " << fmt("%.3e", r.relative_residual) << " |\n";
    if (c.timing) o << "| solve seconds | " << fmt("%.3f", r.solve_seconds) << " |\n";
  }
  return exit_code::ok;
}

int run_export_matrix(const RunConfig& c, std::ostream& out) {
  const StudySettings s = c.study_settings();
  const Discretization d = discretize(s, c.epsilons.front(), c.n_elements.front());
  const FoslsOperatorSpec spec = d.operator_spec(s);
  const SparseSymMatrix m =
      c.matrix == MatrixKind::system ? assemble_system(spec).matrix : assemble_norm_gram(spec);
  Sink sink(c.output, out);
  m.write_coordinate(sink.get());
  return exit_code::ok;
}

} // namespace

StudySettings RunConfig::study_settings() const {
  StudySettings s;
  s.epsilons = epsilons;
  s.n_elements = n_elements;
  s.degree = degree;
  s.gamma = gamma;
  s.k = k;
  s.rescaled = rescaled;
  s.quad_points = quad_points;
  s.problem = problem;
  s.solver = solver;
  return s;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig c;
  CLI::App app{"Weighted least-squares solver for singularly perturbed reaction-diffusion "
               "problems on Shishkin meshes",
               "fosls"};
  app.footer(kFooter);
  app.set_config("--config", "", "Read options from a key = value file");
  app.allow_config_extras(false);

  std::string command;
  std::string solver_name = "direct";
  std::string precond_name = "diagonal";
  std::string problem_name = "manufactured";
  std::string format_name = "csv";
  std::string matrix_name = "system";
  app.add_option("command", command, "study | audit-weight | audit-balance | solve-once | export-matrix")
      ->required()
      ->check(CLI::IsMember(kCommands));

  app.add_option("--epsilon", c.epsilons, "Diffusion parameters (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--N", c.n_elements, "Element counts per direction (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--degree", c.degree, "Polynomial degree p")->check(CLI::Range(1, 3))->capture_default_str();
  app.add_option("--gamma", c.gamma, "Weight decay rate")->capture_default_str();
  app.add_option("--k", c.k, "Curl weight exponent")->capture_default_str();
  app.add_option("--rescaled", c.rescaled, "Use the rescaled flux sqrt(eps) grad u")->capture_default_str();
  app.add_option("--quad-order", c.quad_points, "Gauss points per direction (0: p + 3)")
      ->check(CLI::Range(0, 10))
      ->capture_default_str();
  app.add_option("--solver", solver_name, "cg | direct | dense")
      ->check(CLI::IsMember(kSolvers))
      ->capture_default_str();
  app.add_option("--tol", c.solver.tolerance, "Relative residual tolerance")->capture_default_str();
  app.add_option("--max-iter", c.solver.max_iterations, "CG iteration cap")->capture_default_str();
  app.add_option("--precond", precond_name, "none | diagonal")
      ->check(CLI::IsMember(kPreconditioners))
      ->capture_default_str();
  app.add_option("--problem", problem_name, "manufactured | zero")
      ->check(CLI::IsMember(kProblems))
      ->capture_default_str();
  app.add_option("--format", format_name, "csv | markdown")
      ->check(CLI::IsMember(kFormats))
      ->capture_default_str();
  app.add_option("--output", c.output, "Output file (default stdout)");
  app.add_option("--seed", c.seed, "Seed for random audit samples")->capture_default_str();
  app.add_option("--timing", c.timing, "Report wall-clock times (off: byte-reproducible output)")
      ->capture_default_str();
  app.add_option("--threads", c.threads, "OpenMP threads (0: runtime default)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--samples", c.samples_per_axis, "audit-weight: grid points per axis")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  app.add_option("--random-samples", c.random_samples, "audit-weight: extra seeded uniform points")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--balance-points", c.balance_points, "audit-balance: Gauss points per element")
      ->check(CLI::Range(1, 12))
      ->capture_default_str();
  app.add_option("--balance-tol", c.balance_tolerance, "audit-balance: relative tolerance")
      ->capture_default_str();
  app.add_option("--max-error", c.max_error, "study: fail when a balanced-norm error exceeds this")
      ->capture_default_str();
  app.add_option("--matrix", matrix_name, "export-matrix: system | gram")
      ->check(CLI::IsMember(kMatrices))
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    c.show_help = true;
    c.help_text = app.help();
    return c;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  c.command = kCommands.at(command);
  c.solver.method = kSolvers.at(solver_name);
  c.solver.preconditioner = kPreconditioners.at(precond_name);
  c.problem = kProblems.at(problem_name);
  c.format = kFormats.at(format_name);
  c.matrix = kMatrices.at(matrix_name);
  validate(c);
  return c;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.show_help) {
    out << c.help_text;
    return exit_code::ok;
  }
  if (c.threads > 0) kernels::set_threads(c.threads);
  switch (c.command) {
  case Command::study: return run_study(c, out, err);
  case Command::audit_weight: return run_audit_weight(c, out, err);
  case Command::audit_balance: return run_audit_balance(c, out, err);
  case Command::solve_once: return run_solve_once(c, out, err);
  case Command::export_matrix: return run_export_matrix(c, out);
  }
  return exit_code::usage;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(parse_config(args), out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return exit_code::usage;
  } catch (const UnsupportedOperation& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_code::usage;
  }
}

} // namespace fosls::cli
