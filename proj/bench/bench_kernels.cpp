#include <benchmark/benchmark.h>

#include "levyctl/game.hpp"
#include "levyctl/mc_oracle.hpp"
#include "levyctl/scale_function.hpp"
#include "levyctl/singular_control.hpp"

using namespace levyctl;

namespace {

LevyModel jump_bm() { return LevyModel::with_delta(1.0, 2.0, {{2.0, 1.0}}); }

void BM_ScaleW(benchmark::State& st) {
  const ScaleFamily f(jump_bm(), 0.5, static_cast<Backend>(st.range(0)));
  double x = 0.0;
  for (auto _ : st) {
    x = x > 20.0 ? 0.01 : x + 0.37;
    benchmark::DoNotOptimize(f.W(x));
  }
}
BENCHMARK(BM_ScaleW)->Arg(static_cast<int>(Backend::PartialFraction))->Arg(static_cast<int>(Backend::LaplaceInversion));

void BM_SingularSolve(benchmark::State& st) {
  const SingularProblem p{ScaleFamily(LevyModel::with_gamma(1.0, 0.0), 0.5), PiecewisePolynomial({0.0, 0.0, 1.0}),
                          0.5, 0.5, Interval{}};
  for (auto _ : st) benchmark::DoNotOptimize(solve(p).a_star);
}
BENCHMARK(BM_SingularSolve)->Unit(benchmark::kMillisecond);

void BM_GameSolve(benchmark::State& st) {
  const GameSpec s{ScaleFamily(jump_bm(), 0.5), 0.2, 0.3, 0.1};
  for (auto _ : st) benchmark::DoNotOptimize(solve(s).beta_star);
}
BENCHMARK(BM_GameSolve)->Unit(benchmark::kMillisecond);

// Serial reference loop (arg 0) against the OpenMP kernel (arg 1).
void BM_McExit(benchmark::State& st) {
  SimConfig cfg;
  cfg.n_paths = 20000;
  cfg.parallel = st.range(0) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(mc::exit_two_sided(jump_bm(), 0.5, 1.0, 2.0, cfg).up.mean);
  st.SetItemsProcessed(st.iterations() * cfg.n_paths);
}
BENCHMARK(BM_McExit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_McDoublyReflected(benchmark::State& st) {
  SimConfig cfg;
  cfg.n_paths = 5000;
  cfg.parallel = st.range(0) != 0;
  for (auto _ : st)
    benchmark::DoNotOptimize(mc::doubly_reflected_controls(jump_bm(), 0.5, 0.0, 2.0, 1.0, cfg).upper.mean);
  st.SetItemsProcessed(st.iterations() * cfg.n_paths);
}
BENCHMARK(BM_McDoublyReflected)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
