#include <benchmark/benchmark.h>

#include "hmmcr/data.hpp"
#include "hmmcr/mcmc.hpp"
#include "hmmcr/model.hpp"
#include "hmmcr/simulate.hpp"

using namespace hmmcr;

namespace {

const CaptureDataset& dipperData() {
  static const CaptureDataset d =
      simulateDataset(buildDipperModel(), std::vector<double>{0.6, 0.9}, 294, 7, 1).dataset;
  return d;
}

const CaptureDataset& gooseData() {
  static const CaptureDataset d = [] {
    const auto m = buildGooseModel();
    return simulateDataset(m, initialTheta(m, 3), 11200, 4, 3).dataset;
  }();
  return d;
}

void BM_DipperCjs(benchmark::State& state) {
  const auto m = buildDipperModel();
  const FilteredLikelihood lik(m, dipperData());
  const std::vector<double> theta{0.6, 0.9};
  for (auto _ : state) benchmark::DoNotOptimize(lik(theta));
}

void BM_DipperMatrixFilter(benchmark::State& state) {
  const auto m = buildDipperModel().withMode(LikelihoodMode::MatrixFilter);
  const FilteredLikelihood lik(m, dipperData());
  const std::vector<double> theta{0.6, 0.9};
  for (auto _ : state) benchmark::DoNotOptimize(lik(theta));
}

void BM_GooseFull(benchmark::State& state) {
  const auto m = buildGooseModel();
  const FilteredLikelihood lik(m, gooseData());
  const auto theta = initialTheta(m, 5);
  for (auto _ : state) benchmark::DoNotOptimize(lik(theta));
}

void BM_GooseReduced(benchmark::State& state) {
  const auto m = buildGooseModel();
  const auto reduced = reduce(gooseData());
  const FilteredLikelihood lik(m, reduced);
  const auto theta = initialTheta(m, 5);
  state.counters["unique"] = static_cast<double>(reduced.size());
  for (auto _ : state) benchmark::DoNotOptimize(lik(theta));
}

// Whole sampler iterations: latent-state vs filtered Dipper.
void BM_DipperIterations(benchmark::State& state) {
  const auto m = buildDipperModel();
  auto scheme = SamplerScheme::allUnivariate(2);
  scheme.latentSampling = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(runMcmc(m, dipperData(), scheme, 1000, 1).samples.data());
  }
  state.SetLabel(scheme.latentSampling ? "latent" : "filter");
}

}  // namespace

BENCHMARK(BM_DipperCjs);
BENCHMARK(BM_DipperMatrixFilter);
BENCHMARK(BM_GooseFull)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GooseReduced)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DipperIterations)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
