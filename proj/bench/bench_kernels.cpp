// Serial reference loops against the OpenMP kernels.
//
//   ./bench_kernels --benchmark_filter=Assemble
// Arg: subdivisions n of the unit square; second arg 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "plate/assembly.hpp"
#include "plate/estimator.hpp"
#include "plate/linear_solve.hpp"

using namespace plate;

namespace {

PlateProblem benchmark_problem() {
  const ClampedBenchmark b = clamped_benchmark();
  return {b.material, b.load, BoundarySpec::preset(4, "clamped"), b.exact};
}

Execution exec_of(const benchmark::State& state) {
  return state.range(1) == 0 ? Execution::serial : Execution::parallel;
}

void BM_AssembleNitsche(benchmark::State& state) {
  const ArgyrisSpace space(build_unit_square_mesh(static_cast<int>(state.range(0))));
  const PlateProblem p = benchmark_problem();
  AssemblyOptions opts;
  opts.execution = exec_of(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble(space, p, Method::nitsche, 1e-3, opts));
  state.counters["dofs"] = space.num_dofs();
  state.counters["threads"] = opts.execution == Execution::serial ? 1 : max_threads();
}

void BM_Estimators(benchmark::State& state) {
  const ArgyrisSpace space(build_unit_square_mesh(static_cast<int>(state.range(0))));
  const PlateProblem p = benchmark_problem();
  const Solution s = solve_spd(assemble(space, p, Method::nitsche, 1e-3));
  EstimatorOptions opts;
  opts.execution = exec_of(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_estimators(space, s.coefficients, p, opts));
  state.counters["elements"] = space.mesh().num_triangles();
}

void BM_MeshNormError(benchmark::State& state) {
  const ArgyrisSpace space(build_unit_square_mesh(static_cast<int>(state.range(0))));
  const PlateProblem p = benchmark_problem();
  const Solution s = solve_spd(assemble(space, p, Method::nitsche, 1e-3));
  EstimatorOptions opts;
  opts.execution = exec_of(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(mesh_norm_error(space, s.coefficients, *p.exact, p, opts));
}

void BM_Solve(benchmark::State& state) {
  const ArgyrisSpace space(build_unit_square_mesh(static_cast<int>(state.range(0))));
  const SparseSystem sys = assemble(space, benchmark_problem(), Method::nitsche, 1e-3);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_spd(sys));
  state.counters["dofs"] = sys.size();
}

} // namespace

BENCHMARK(BM_AssembleNitsche)->ArgsProduct({{8, 16, 32}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Estimators)->ArgsProduct({{8, 16, 32}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MeshNormError)->ArgsProduct({{8, 16}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Solve)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
