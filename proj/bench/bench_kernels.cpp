#include "fosls/analysis.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace fosls;

namespace {

struct Fixture {
  StudySettings settings;
  Discretization disc;
  AssembledSystem system;

  explicit Fixture(int n, int degree)
      : settings(make_settings(degree)), disc(discretize(settings, 1e-8, n)),
        system(assemble_system(disc.operator_spec(settings))) {}

  static StudySettings make_settings(int degree) {
    StudySettings s;
    s.degree = degree;
    return s;
  }
};

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "openmp x" + std::to_string(kernels::max_threads()));
}

void BM_Assembly(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(1)), 2);
  const FoslsOperatorSpec spec = f.disc.operator_spec(f.settings);
  for (auto _ : state) {
    AssembledSystem s = assemble_system(spec, true, exec_of(state));
    benchmark::DoNotOptimize(s.rhs.data());
  }
  label(state);
}
BENCHMARK(BM_Assembly)->ArgsProduct({{0, 1}, {32, 64}})->Unit(benchmark::kMillisecond);

void BM_SpMV(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(1)), 2);
  const SparseSymMatrix& a = f.system.matrix;
  std::vector<double> y(f.system.rhs.size());
  for (auto _ : state) {
    if (exec_of(state) == Execution::serial) {
      kernels::spmv_serial(a, f.system.rhs, y);
    } else {
      kernels::spmv_parallel(a, f.system.rhs, y);
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.nnz()));
  label(state);
}
BENCHMARK(BM_SpMV)->ArgsProduct({{0, 1}, {64, 128}})->Unit(benchmark::kMicrosecond);

void BM_Dot(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(state.range(1))), y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = u(rng);
    y[i] = u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dot(x, y, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(1));
  label(state);
}
BENCHMARK(BM_Dot)->ArgsProduct({{0, 1}, {1 << 16, 1 << 20}})->Unit(benchmark::kMicrosecond);

void BM_ConjugateGradient(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(1)), 1);
  SolverConfig cfg{SolverMethod::conjugate_gradient, 1e-8};
  cfg.execution = exec_of(state);
  int iterations = 0;
  for (auto _ : state) {
    const SolveResult r = solve_spd(f.system.matrix, f.system.rhs, cfg);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.solution.data());
  }
  state.counters["cg_iterations"] = iterations;
  label(state);
}
BENCHMARK(BM_ConjugateGradient)->ArgsProduct({{0, 1}, {32}})->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
