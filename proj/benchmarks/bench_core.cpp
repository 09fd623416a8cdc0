#include <benchmark/benchmark.h>

#include <numbers>

#include "exinf/consistency.hpp"
#include "exinf/doubleslit.hpp"
#include "exinf/eigensolver.hpp"
#include "exinf/variational.hpp"

using namespace exinf;

namespace {

void BM_SolveSpectrumHarmonic(benchmark::State& state) {
  const Grid g(-10.0, 10.0, static_cast<std::size_t>(state.range(0)));
  const Potential v = Potential::harmonic(2.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_spectrum(v, g, 4));
}
BENCHMARK(BM_SolveSpectrumHarmonic)->Arg(501)->Arg(2001)->Arg(8001)->Unit(benchmark::kMillisecond);

void BM_SolveSpectrumRing(benchmark::State& state) {
  const Grid g(0.0, 2.0 * std::numbers::pi, static_cast<std::size_t>(state.range(0)), Boundary::periodic);
  for (auto _ : state) benchmark::DoNotOptimize(solve_spectrum(Potential::free(), g, 5));
}
BENCHMARK(BM_SolveSpectrumRing)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_MinimizeFunctional(benchmark::State& state) {
  const Grid g(-10.0, 10.0, static_cast<std::size_t>(state.range(0)));
  const Potential v = Potential::harmonic(2.0);
  VariationalOptions opts;
  opts.seed = 3;
  for (auto _ : state) benchmark::DoNotOptimize(minimize_functional(v, g, 4, opts));
}
BENCHMARK(BM_MinimizeFunctional)->Arg(501)->Arg(2001)->Unit(benchmark::kMillisecond);

void BM_EnergyMoments(benchmark::State& state) {
  const Grid g(0.0, std::numbers::pi, 2001);
  const Spectrum s = solve_spectrum(Potential::free(), g, 2);
  const ScalarField psi = Complex(0.6) * s[0].state + Complex(0.8) * s[1].state;
  for (auto _ : state) benchmark::DoNotOptimize(energy_moments(psi, Potential::free()));
}
BENCHMARK(BM_EnergyMoments);

void BM_PatternWave(benchmark::State& state) {
  SlitConfig c;
  c.wavenumber = 20.0 * std::numbers::pi;
  c.bins = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pattern_wave(c));
}
BENCHMARK(BM_PatternWave)->Arg(256)->Arg(2048)->Arg(16384);

void BM_SampleHits(benchmark::State& state) {
  SlitConfig c;
  c.wavenumber = 20.0 * std::numbers::pi;
  c.bins = 2048;
  const DetectorPattern p = pattern_wave(c);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_hits(p, n, 1));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_SampleHits)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
