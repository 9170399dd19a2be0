#include <benchmark/benchmark.h>

#include "dspec/resolvent.hpp"
#include "dspec/root_functions.hpp"
#include "dspec/spectrum.hpp"
#include "dspec/timoshenko.hpp"

namespace {

using namespace dspec;

DiracBVP periodic_pair() {
  return make_bvp({-1.0, 1.0}, CMatrix::Identity(2, 2), -CMatrix::Identity(2, 2));
}

DiracBVP coupled_grid(int cells) {
  std::vector<CMatrix> s;
  for (int i = 0; i <= cells; ++i) {
    const double x = static_cast<double>(i) / cells;
    CMatrix q(2, 2);
    q << 0.0, cplx(std::cos(4 * x), 0.3), cplx(0.5, -x), 0.0;
    s.push_back(q);
  }
  return make_bvp({-1.0, 1.0}, CMatrix::Identity(2, 2), -CMatrix::Identity(2, 2), PotentialField::grid(s, 1));
}

void BM_CharDeterminant(benchmark::State& state) {
  const DiracBVP bvp = coupled_grid(64);
  const cplx lambda(static_cast<double>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(char_determinant(bvp, lambda));
}
BENCHMARK(BM_CharDeterminant)->Arg(1)->Arg(10)->Arg(100);

void BM_CountZeros(benchmark::State& state) {
  const DiracBVP bvp = periodic_pair();
  const double w = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(count_zeros(bvp, Rect{-w, w, -1.0, 1.0}));
}
BENCHMARK(BM_CountZeros)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_LocateEigenvalues(benchmark::State& state) {
  const DiracBVP bvp = coupled_grid(32);
  const double w = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(locate_eigenvalues(bvp, Rect{-w, w, -1.5, 1.5}));
}
BENCHMARK(BM_LocateEigenvalues)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_RootChains(benchmark::State& state) {
  const DiracBVP bvp = periodic_pair();
  const auto grid = uniform_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(root_chains(bvp, 2 * kPi, 2, grid));
}
BENCHMARK(BM_RootChains)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_GreenJump(benchmark::State& state) {
  const DiracBVP bvp = coupled_grid(32);
  std::vector<double> xs;
  for (int i = 1; i < 10; ++i) xs.push_back(i / 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(green_jump(bvp, cplx(0.0, 1.0), xs));
}
BENCHMARK(BM_GreenJump)->Unit(benchmark::kMicrosecond);

void BM_TraceFormula(benchmark::State& state) {
  const DiracBVP a = periodic_pair();
  const DiracBVP b = make_bvp({-1.0, 1.0}, CMatrix::Identity(2, 2), CMatrix::Zero(2, 2));
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(trace_formula_diff(a, b, cplx(0.0, 1.0), N));
}
BENCHMARK(BM_TraceFormula)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_BeamReduction(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  BeamModel beam = constant_beam(1.0, 1.0, 4.0, 1.0, 1.0, 2.5, 13.0 / 12);
  beam.rho.resize(m + 1);
  beam.I_rho.resize(m + 1);
  for (int i = 0; i <= m; ++i) {
    beam.rho(i) = 1.0 + 0.5 * i / m;
    beam.I_rho(i) = 4.0 * beam.rho(i);
  }
  beam.K = beam.rho / beam.rho(0);
  beam.EI = beam.K;
  for (auto _ : state) benchmark::DoNotOptimize(reduce_to_dirac(beam));
}
BENCHMARK(BM_BeamReduction)->Arg(64)->Arg(512)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
