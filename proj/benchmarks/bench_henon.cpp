#include <benchmark/benchmark.h>

#include "henon/bifurcation.hpp"
#include "henon/radial.hpp"
#include "henon/spectral.hpp"

using namespace henon;

static void BM_Shot(benchmark::State& state) {
  const double alpha = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(integrate_radial_ivp(3, alpha, 5.0 + alpha - 0.05, 1.0, 1e5));
}
BENCHMARK(BM_Shot)->Arg(0)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_SolveDirichlet(benchmark::State& state) {
  const double eps = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_dirichlet_ball(ProblemParams(3, 2.0, eps)));
}
BENCHMARK(BM_SolveDirichlet)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_PencilEigen(benchmark::State& state) {
  const auto prof = solve_dirichlet_ball(ProblemParams(3, 2.0, 0.05));
  const auto pr = unit_ball_problem(prof);
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues(pr, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_PencilEigen)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_Prufer(benchmark::State& state) {
  const auto prof = solve_dirichlet_ball(ProblemParams(3, 2.0, 0.05));
  const auto pr = unit_ball_problem(prof);
  const double lam = eigenvalues(pr, 1)[0].lambda;
  for (auto _ : state) benchmark::DoNotOptimize(prufer_eigen(pr, 1, lam - 0.05, lam + 0.05));
}
BENCHMARK(BM_Prufer)->Unit(benchmark::kMillisecond);

static void BM_LimitEigen(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(limit_eigen(3, 2.0, 1e3));
}
BENCHMARK(BM_LimitEigen)->Unit(benchmark::kMillisecond);

static void BM_Bifurcation(benchmark::State& state) {
  BifurcationOptions opt;
  for (auto _ : state) {
    ProfileCache cache;
    benchmark::DoNotOptimize(find_bifurcation_alpha(3, 0.01, 2, opt, cache));
  }
}
BENCHMARK(BM_Bifurcation)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
