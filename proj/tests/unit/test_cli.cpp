#include "check.hpp"

#include "fosls/cli.hpp"
#include "fosls/errors.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace fosls;
using namespace fosls::cli;

namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "fosls");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << contents;
  return path;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

} // namespace

TEST_CASE("study arguments are parsed") {
  const RunConfig c = parse_config({"study", "--epsilon", "1e-8", "--N", "32,64", "--degree", "1"});
  CHECK(c.command == Command::study);
  CHECK(c.epsilons == std::vector<double>{1e-8});
  CHECK(c.n_elements == std::vector<int>{32, 64});
  CHECK(c.degree == 1);
  CHECK(c.solver.method == SolverMethod::sparse_direct);
  const StudySettings s = c.study_settings();
  CHECK(s.n_elements == c.n_elements);
  CHECK(s.gamma == 0.5);
}

TEST_CASE("defaults and enumerated options") {
  const RunConfig d = parse_config({"solve-once"});
  CHECK(d.command == Command::solve_once);
  CHECK(d.epsilons == std::vector<double>{1e-8});
  CHECK(d.n_elements == std::vector<int>{32, 64, 128});
  CHECK(d.rescaled);
  CHECK(d.k == 2.0);

  const RunConfig c = parse_config({"export-matrix", "--solver", "cg", "--precond", "none", "--problem", "zero",
                                    "--format", "markdown", "--matrix", "gram", "--rescaled", "false"});
  CHECK(c.command == Command::export_matrix);
  CHECK(c.solver.method == SolverMethod::conjugate_gradient);
  CHECK(c.solver.preconditioner == Preconditioner::none);
  CHECK(c.problem == ProblemKind::zero);
  CHECK(c.format == OutputFormat::markdown);
  CHECK(c.matrix == MatrixKind::gram);
  CHECK_FALSE(c.rescaled);
}

TEST_CASE("invalid command lines are usage errors") {
  CHECK_THROWS_AS(parse_config({}), UsageError);
  CHECK_THROWS_AS(parse_config({"frobnicate"}), UsageError);
  CHECK_THROWS_AS(parse_config({"study", "--bogus", "1"}), UsageError);
  CHECK_THROWS_AS(parse_config({"study", "--degree", "4"}), UsageError);
  CHECK_THROWS_AS(parse_config({"study", "--N", "7"}), UsageError);
  CHECK_THROWS_AS(parse_config({"study", "--N", "2"}), UsageError);
  CHECK_THROWS_AS(parse_config({"study", "--epsilon", "-1"}), UsageError);
  CHECK_THROWS_AS(parse_config({"study", "--epsilon", "abc"}), UsageError);
  CHECK_THROWS_AS(parse_config({"study", "--solver", "lu"}), UsageError);
  CHECK_THROWS_AS(parse_config({"study", "--tol", "0"}), UsageError);
  CHECK_THROWS_AS(parse_config({"study", "--gamma", "0"}), UsageError);

  const Outcome o = invoke({"study", "--bogus"});
  CHECK(o.status == exit_code::usage);
  CHECK(o.err.find("usage error") != std::string::npos);
  CHECK(invoke({}).status == exit_code::usage);
}

TEST_CASE("config file values are overridden by flags") {
  const auto path = temp_file("fosls_cli_test.cfg", "# study settings\ndegree = 2\nN = [8, 16]\nepsilon = 1e-6\n");
  const RunConfig file_only = parse_config({"study", "--config", path.string()});
  CHECK(file_only.degree == 2);
  CHECK(file_only.n_elements == std::vector<int>{8, 16});
  CHECK(file_only.epsilons == std::vector<double>{1e-6});
  const RunConfig both = parse_config({"study", "--config", path.string(), "--degree", "3"});
  CHECK(both.degree == 3);

  const auto bad = temp_file("fosls_cli_bad.cfg", "degre = 2\n");
  CHECK_THROWS_AS(parse_config({"study", "--config", bad.string()}), UsageError);
  CHECK_THROWS_AS(parse_config({"study", "--config", "/nonexistent/fosls.cfg"}), UsageError);
  std::filesystem::remove(path);
  std::filesystem::remove(bad);
}

TEST_CASE("help exits cleanly and documents exit codes") {
  const Outcome o = invoke({"--help"});
  CHECK(o.status == exit_code::ok);
  CHECK(o.out.find("audit-weight") != std::string::npos);
  CHECK(o.out.find("exit") != std::string::npos);
}

TEST_CASE("solve-once on zero data reports zero errors") {
  const Outcome o = invoke({"solve-once", "--problem", "zero", "--epsilon", "1e-6", "--N", "8", "--timing", "false"});
  REQUIRE(o.status == exit_code::ok);
  std::istringstream in(o.out);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  const auto h = split_fields(header);
  const auto f = split_fields(row);
  REQUIRE(h.size() == f.size());
  CHECK(h[4] == "beta_norm_err");
  CHECK(std::stod(f[4]) == 0.0);
  CHECK(std::stod(f[5]) == 0.0);
  CHECK(std::stoi(f[3]) == 3 * 81);
}

TEST_CASE("study CSV is byte-identical across runs with timing off") {
  const std::vector<std::string> args{"study", "--epsilon", "1e-6,1e-8", "--N", "8,16", "--timing", "false"};
  const Outcome a = invoke(args);
  const Outcome b = invoke(args);
  REQUIRE(a.status == exit_code::ok);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("epsilon,N,p,", 0) == 0);
}

TEST_CASE("study output file and markdown format") {
  const auto path = std::filesystem::temp_directory_path() / "fosls_cli_study.md";
  const Outcome o = invoke({"study", "--epsilon", "1e-8", "--N", "8,16", "--format", "markdown", "--output",
                            path.string()});
  REQUIRE(o.status == exit_code::ok);
  CHECK(o.out.empty());
  std::ifstream in(path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("| N=8 | N=16 |") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("exit codes for solver failure and error threshold") {
  const Outcome fail = invoke({"study", "--epsilon", "1e-6", "--N", "8", "--solver", "cg", "--max-iter", "1",
                               "--tol", "1e-14"});
  CHECK(fail.status == exit_code::solver_failure);
  CHECK(fail.err.find("failed") != std::string::npos);

  const Outcome over = invoke({"study", "--epsilon", "1e-6", "--N", "8", "--max-error", "1e-6"});
  CHECK(over.status == exit_code::threshold);
  const Outcome under = invoke({"study", "--epsilon", "1e-6", "--N", "8", "--max-error", "10"});
  CHECK(under.status == exit_code::ok);

  const Outcome once = invoke({"solve-once", "--epsilon", "1e-6", "--N", "8", "--solver", "cg", "--max-iter",
                               "1", "--tol", "1e-14"});
  CHECK(once.status == exit_code::solver_failure);
}

TEST_CASE("audit-weight passes for the default settings") {
  const Outcome o = invoke({"audit-weight", "--epsilon", "1e-4,1e-8,1e-12", "--samples", "50",
                            "--random-samples", "100"});
  REQUIRE(o.status == exit_code::ok);
  std::istringstream in(o.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "epsilon,gamma,C,max_ratio,argmax_x,argmax_y,samples");
  int rows = 0;
  while (std::getline(in, line)) {
    const auto f = split_fields(line);
    REQUIRE(f.size() == 7);
    CHECK(std::stod(f[3]) < 1.0);
    CHECK(std::stoi(f[6]) == 50 * 50 + 100);
    ++rows;
  }
  CHECK(rows == 3);
  CHECK(invoke({"audit-weight", "--gamma", "0.9"}).status == exit_code::usage);
}

TEST_CASE("audit-balance reports agreement") {
  const Outcome o = invoke({"audit-balance", "--epsilon", "1e-6,1e-10", "--N", "64", "--degree", "3"});
  CHECK(o.status == exit_code::ok);
  const Outcome strict = invoke({"audit-balance", "--epsilon", "1e-6", "--N", "8", "--balance-points", "1",
                                 "--balance-tol", "1e-14"});
  CHECK(strict.status == exit_code::threshold);
}

TEST_CASE("export-matrix writes a coordinate file") {
  const Outcome o = invoke({"export-matrix", "--epsilon", "1e-4", "--N", "4"});
  REQUIRE(o.status == exit_code::ok);
  CHECK(o.out.rfind("%%MatrixMarket matrix coordinate real", 0) == 0);
  std::istringstream in(o.out);
  std::string banner;
  std::getline(in, banner);
  int rows = 0, cols = 0;
  in >> rows >> cols;
  CHECK(rows == 75);
  CHECK(cols == 75);
}

TEST_CASE("installed binary honours the exit code contract") {
  const std::string exe = FOSLS_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("--help") == exit_code::ok);
  CHECK(status("") == exit_code::usage);
  CHECK(status("study --N 5") == exit_code::usage);
  CHECK(status("audit-weight --samples 20") == exit_code::ok);
}
