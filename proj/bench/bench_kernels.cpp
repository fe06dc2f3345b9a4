// Serial reference kernels against the OpenMP production kernels.
#include <benchmark/benchmark.h>

#include <vector>

#include "klandau/diffusion.hpp"
#include "klandau/interaction.hpp"
#include "klandau/reference.hpp"
#include "klandau/state.hpp"

namespace {

using namespace klandau;

struct Fixture {
  SystemState state;
  InteractionConfig cfg;
  std::vector<double> xi;
  NoiseDraws draws;

  explicit Fixture(std::size_t n) : cfg(InteractionConfig::for_particles(n)) {
    Rng rng(7);
    state.velocities.resize(n);
    for (Vec3& v : state.velocities) v = {rng.normal(), rng.normal(), rng.normal()};
    xi.resize(3 * n);
    for (double& x : xi) x = rng.normal();
    draws = NoiseDraws::draw(n, true, rng);
  }
};

void BM_QuadraticForm(benchmark::State& st) {
  const Fixture f(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(quadratic_form(f.state, f.cfg, f.xi));
}

void BM_QuadraticFormReference(benchmark::State& st) {
  const Fixture f(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::quadratic_form(f.state, f.cfg, f.xi));
}

void BM_Drift(benchmark::State& st) {
  const Fixture f(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(drift(f.state, f.cfg));
}

void BM_DriftReference(benchmark::State& st) {
  const Fixture f(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::drift(f.state, f.cfg));
}

void BM_Noise(benchmark::State& st) {
  const Fixture f(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(noise_from_draws(f.state, f.cfg, 1e-3, f.draws));
}

void BM_NoiseReference(benchmark::State& st) {
  const Fixture f(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::noise_from_draws(f.state, f.cfg, 1e-3, f.draws));
}

}  // namespace

BENCHMARK(BM_QuadraticForm)->RangeMultiplier(4)->Range(64, 1024);
BENCHMARK(BM_QuadraticFormReference)->RangeMultiplier(4)->Range(64, 1024);
BENCHMARK(BM_Drift)->RangeMultiplier(4)->Range(64, 1024);
BENCHMARK(BM_DriftReference)->RangeMultiplier(4)->Range(64, 1024);
BENCHMARK(BM_Noise)->RangeMultiplier(4)->Range(64, 1024);
BENCHMARK(BM_NoiseReference)->RangeMultiplier(4)->Range(64, 1024);

BENCHMARK_MAIN();
