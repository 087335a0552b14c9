#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmmcr/data.hpp"
#include "hmmcr/hmm.hpp"
#include "hmmcr/model.hpp"
#include "hmmcr/random.hpp"
#include "hmmcr/samplers.hpp"
#include "hmmcr/target.hpp"

namespace hmmcr {

/// Assignment of parameters to samplers. Singleton blocks get univariate
/// random-walk samplers, larger blocks get block random-walk samplers.
struct SamplerScheme {
  std::vector<std::vector<std::size_t>> blocks;
  bool latentSampling = false;
  AdaptationSettings adaptation;

  static SamplerScheme allUnivariate(std::size_t dimension);
  static SamplerScheme singleBlock(std::size_t dimension);

  /// Throws InvalidArgument unless blocks partition [0, dimension).
  void validate(std::size_t dimension) const;
  /// Blocks with more than one parameter.
  std::size_t multiParameterBlocks() const;
  /// Blocks sorted internally and by first index, for comparisons.
  SamplerScheme canonical() const;
  std::string describe(const std::vector<std::string>& names) const;
};

/// The posterior handed to the engine, plus an optional latent update run
/// once per iteration after the parameter samplers.
struct SamplingProblem {
  FactoredDensity density;
  std::vector<double> initial;
  std::function<void(std::span<const double> theta, Rng& rng)> latentSweep;
  std::size_t latentCount = 0;
};

struct McmcSettings {
  std::size_t iterations = 10'000;
  std::uint64_t seed = 1;
  /// Pilot posterior covariance (dimension x dimension). When present,
  /// univariate scales start at 2.38 * sd and block covariances at the
  /// matching sub-matrix.
  std::optional<Matrix> proposalCovariance;
};

struct ChainOutput {
  std::vector<std::string> names;
  /// iterations x dimension, one row per iteration.
  Matrix samples;
  /// Wall-clock seconds of the sampling loop only (setup and I/O excluded).
  double runtimeSeconds = 0.0;
  /// One entry per scheme block.
  std::vector<double> acceptanceRates;
  std::uint64_t seed = 0;
  SamplerScheme scheme;
  std::size_t latentCount = 0;
  std::vector<double> finalState;
  /// Density-term evaluations in the sampling loop, weighted by term cost.
  /// Unlike runtimeSeconds it is a pure function of the inputs.
  double work = 0.0;

  std::size_t iterations() const { return static_cast<std::size_t>(samples.rows()); }
  std::size_t dimension() const { return static_cast<std::size_t>(samples.cols()); }
};

/// Runs one chain. Deterministic given (problem, scheme, settings).
ChainOutput runMcmc(const SamplingProblem& problem, const SamplerScheme& scheme,
                    const McmcSettings& settings);

/// Filtering MCMC on the full dataset, or latent-state MCMC when
/// `scheme.latentSampling` is set. The starting point is drawn from `seed`.
ChainOutput runMcmc(const HierarchicalModel& model, const CaptureDataset& dataset,
                    const SamplerScheme& scheme, std::size_t iterations, std::uint64_t seed);

/// Filtering MCMC on the reduced representation. Latent sampling is rejected
/// because every individual needs its own latent sequence.
ChainOutput runMcmc(const HierarchicalModel& model, const ReducedDataset& reduced,
                    const SamplerScheme& scheme, std::size_t iterations, std::uint64_t seed);

/// Prior terms (one per parameter) plus one filtered likelihood term.
SamplingProblem filteredProblem(const HierarchicalModel& model, const ReducedDataset& reduced,
                                std::vector<double> initial);
SamplingProblem filteredProblem(const HierarchicalModel& model, const CaptureDataset& dataset,
                                std::vector<double> initial);

/// Prior terms plus the complete-data likelihood at the current latent
/// states, with a systematic Gibbs sweep (i ascending, t ascending) over
/// every sampled latent each iteration.
SamplingProblem latentProblem(const HierarchicalModel& model, const CaptureDataset& dataset,
                              std::vector<double> initial);

/// Starting point used by the model-level runMcmc for `seed`.
std::vector<double> initialTheta(const HierarchicalModel& model, std::uint64_t seed);

}  // namespace hmmcr
