#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sllb/domain.hpp"
#include "sllb/kernels.hpp"
#include "sllb/model.hpp"
#include "sllb/spectral.hpp"

using namespace sllb;

namespace {

struct Setup {
  SpacePtr space;
  std::vector<double> coeffs, values;

  explicit Setup(int n) : space(Space::make(DomainSpec::rectangle(n, n))) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    coeffs.resize(3 * space->n());
    values.resize(3 * space->grid_size());
    for (double& c : coeffs) c = z(rng);
  }
};

void BM_synthesize(benchmark::State& state) {
  Setup s(int(state.range(0)));
  for (auto _ : state) {
    kernels::synthesize(*s.space, s.coeffs, s.values, 3);
    benchmark::DoNotOptimize(s.values.data());
  }
}

void BM_synthesize_reference(benchmark::State& state) {
  Setup s(int(state.range(0)));
  for (auto _ : state) {
    kernels::reference::synthesize(*s.space, s.coeffs, s.values, 3);
    benchmark::DoNotOptimize(s.values.data());
  }
}

void BM_analyze(benchmark::State& state) {
  Setup s(int(state.range(0)));
  for (auto _ : state) {
    kernels::analyze(*s.space, s.values, s.coeffs, 3);
    benchmark::DoNotOptimize(s.coeffs.data());
  }
}

void BM_analyze_reference(benchmark::State& state) {
  Setup s(int(state.range(0)));
  for (auto _ : state) {
    kernels::reference::analyze(*s.space, s.values, s.coeffs, 3);
    benchmark::DoNotOptimize(s.coeffs.data());
  }
}

// Full nonlinear drift on the dealiased grid.
void BM_drift(benchmark::State& state) {
  const int n = int(state.range(0));
  const auto space = Space::make(DomainSpec::rectangle(n, n));
  const GalerkinSystem sys(space, ModelParams{}, build_default_noise(space, 8));
  SpectralField u(space);
  for (std::size_t i = 0; i < space->n(); ++i) u(0, i) = 1.0 / (1.0 + space->lambda(i));
  for (auto _ : state) benchmark::DoNotOptimize(sys.drift(u));
}

}  // namespace

BENCHMARK(BM_synthesize)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(BM_synthesize_reference)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(BM_analyze)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(BM_analyze_reference)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(BM_drift)->Arg(8)->Arg(16);

BENCHMARK_MAIN();
