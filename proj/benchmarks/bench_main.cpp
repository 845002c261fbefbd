// Timings of the expensive stages: Coulomb functions, basis construction,
// kernel assembly per scheme, diagonalization and the quadrature study.

#include <benchmark/benchmark.h>

#include "berggren/basis.hpp"
#include "berggren/eig.hpp"
#include "berggren/kernel.hpp"
#include "berggren/quadstudy.hpp"
#include "berggren/specfun.hpp"

namespace {

using namespace berggren;

const DiscretizedBasis& shared_basis(int n_gl) {
  static const DiscretizedBasis b45 =
      build_default_basis(PotentialParams{}, PartialWave::make(0, 1), 45);
  static const DiscretizedBasis b120 =
      build_default_basis(PotentialParams{}, PartialWave::make(0, 1), 120);
  return n_gl == 45 ? b45 : b120;
}

void BM_CoulombH(benchmark::State& state) {
  const CoulombParams p{static_cast<int>(state.range(0)), {1.2, -0.3}};
  const cplx z{8.0, -1.5};
  for (auto _ : state) benchmark::DoNotOptimize(coulomb_H(Sign::plus, p, z));
}
BENCHMARK(BM_CoulombH)->Arg(0)->Arg(2);

void BM_BuildBasis(benchmark::State& state) {
  const PartialWave pw = PartialWave::make(2, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_default_basis(PotentialParams{}, pw, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_BuildBasis)->Arg(45)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
  const auto scheme = static_cast<Scheme>(state.range(0));
  const DiscretizedBasis& basis = shared_basis(static_cast<int>(state.range(1)));
  const ResidualCoulomb v = ResidualCoulomb::between(basis.potential, 8.0);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(scheme, basis, v));
  state.SetLabel(to_string(scheme));
}
BENCHMARK(BM_Assemble)
    ->ArgsProduct({{static_cast<int>(Scheme::cut), static_cast<int>(Scheme::subtraction),
                    static_cast<int>(Scheme::offdiag)},
                   {45}})
    ->Unit(benchmark::kMillisecond);

void BM_Diagonalize(benchmark::State& state) {
  const DiscretizedBasis& basis = shared_basis(static_cast<int>(state.range(0)));
  const KernelMatrix kernel =
      assemble_cut(basis, ResidualCoulomb::between(basis.potential, 8.0));
  for (auto _ : state) benchmark::DoNotOptimize(diagonalize(kernel));
}
BENCHMARK(BM_Diagonalize)->Arg(45)->Arg(120)->Unit(benchmark::kMillisecond);

void BM_QuadStudy(benchmark::State& state) {
  StudyConfig cfg;
  cfg.n_gl = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(delta_I(cfg));
}
BENCHMARK(BM_QuadStudy)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
