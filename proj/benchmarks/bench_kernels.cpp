#include <benchmark/benchmark.h>

#include <cmath>

#include "optohmf/hmf.hpp"
#include "optohmf/simulation.hpp"
#include "optohmf/smf.hpp"
#include "optohmf/spectral.hpp"

using namespace optohmf;

namespace {

ComplexVec seeded(const Grid& g) {
  ComplexVec psi(g.size());
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = 1.0 + 0.01 * std::cos(g.theta(i) / g.periods());
  normalize(psi);
  return psi;
}

void BM_FftRoundTrip(benchmark::State& state) {
  const Grid g(static_cast<std::size_t>(state.range(0)), 1);
  SpectralEngine engine(g);
  ComplexVec psi = seeded(g);
  for (auto _ : state) {
    engine.forward_in_place(psi);
    engine.inverse_in_place(psi);
    benchmark::DoNotOptimize(psi.data());
  }
}

void BM_SmfStep(benchmark::State& state) {
  const Grid g(static_cast<std::size_t>(state.range(0)), 8);
  smf::Solver solver(PhysParams{100.0, 500.0, 2.2e-10, 1.0, 1e-8}, g);
  ComplexVec psi = seeded(g);
  for (auto _ : state) {
    solver.step(psi, 1e-3);
    benchmark::DoNotOptimize(psi.data());
  }
}

void BM_HmfStep(benchmark::State& state) {
  const Grid g(static_cast<std::size_t>(state.range(0)), 8);
  hmf::Solver solver(1.1, g);
  ComplexVec psi = seeded(g);
  for (auto _ : state) {
    solver.step(psi, 1e-3);
    benchmark::DoNotOptimize(psi.data());
  }
}

}  // namespace

BENCHMARK(BM_FftRoundTrip)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_SmfStep)->RangeMultiplier(4)->Range(256, 4096);
BENCHMARK(BM_HmfStep)->RangeMultiplier(4)->Range(256, 4096);
BENCHMARK_MAIN();
