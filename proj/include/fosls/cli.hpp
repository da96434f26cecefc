#pragma once

#include "fosls/analysis.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fosls::cli {

enum class Command { study, audit_weight, audit_balance, solve_once, export_matrix };
enum class OutputFormat { csv, markdown };
enum class MatrixKind { system, gram };

/// Process exit status contract.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 2;
inline constexpr int solver_failure = 3;
inline constexpr int threshold = 4;
} // namespace exit_code

struct RunConfig {
  Command command = Command::study;
  std::vector<double> epsilons{1e-8};
  std::vector<int> n_elements{32, 64, 128};
  int degree = 1;
  double gamma = 0.5;
  double k = 2.0;
  bool rescaled = true;
  int quad_points = 0; // 0: p + 3
  SolverConfig solver{SolverMethod::sparse_direct};
  ProblemKind problem = ProblemKind::manufactured;
  OutputFormat format = OutputFormat::csv;
  std::string output; // empty: stdout
  std::uint64_t seed = 20240101;
  bool timing = true;
  int threads = 0; // 0: OpenMP default

  int samples_per_axis = 200;   // audit-weight grid
  int random_samples = 0;       // audit-weight extra seeded points
  int balance_points = 12;      // audit-balance Gauss points per element
  double balance_tolerance = 1e-8;
  double max_error = 0.0;       // study: > 0 turns into a threshold check
  MatrixKind matrix = MatrixKind::system;

  bool show_help = false;
  std::string help_text;

  StudySettings study_settings() const;
};

/// Parses arguments (without the program name). A config file given by
/// --config holds `key = value` lines named after the long options, with
/// `#` comments; command-line flags take precedence over the file.
/// Throws UsageError on unknown keys, malformed values or a missing command.
RunConfig parse_config(const std::vector<std::string>& args);

/// Executes a parsed configuration; returns an exit_code value.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_config + run with usage errors mapped to exit_code::usage.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace fosls::cli
