#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hmmcr/clustering.hpp"
#include "hmmcr/data.hpp"
#include "hmmcr/mcmc.hpp"
#include "hmmcr/model.hpp"

namespace hmmcr {

inline constexpr std::size_t kMinPilotRows = 1000;

struct CorrelationEstimate {
  Matrix correlation;
  Matrix covariance;
  /// Parameters whose post-discard column was constant.
  std::vector<std::size_t> constantColumns;
};

/// Sample correlation of the rows after the discard fraction. Constant
/// columns get zero off-diagonal correlation. Throws ChainTooShort with fewer
/// than kMinPilotRows rows left.
CorrelationEstimate estimateCorrelationFull(const ChainOutput& pilot, double discardFraction);
Matrix estimateCorrelation(const ChainOutput& pilot, double discardFraction);

/// What the candidate efficiency is divided by: wall-clock seconds, or the
/// chain's counted work (reproducible run to run).
enum class EfficiencyCost { WallClock, Work };

struct AutoBlockSettings {
  std::size_t pilotIterations = 10'000;
  std::size_t evalIterations = 5'000;
  double discardFraction = 0.1;
  std::vector<double> heights = defaultCutHeights();
  std::uint64_t seed = 1;
  /// Re-pilot under the chosen scheme until the selection stops changing.
  bool iterate = false;
  std::size_t maxRounds = 5;
  EfficiencyCost cost = EfficiencyCost::WallClock;
};

/// Min over parameters of ESS per second, or per million units of work.
double minEfficiency(const ChainOutput& chain, double discardFraction, EfficiencyCost cost);

struct AutoBlockResult {
  SamplerScheme scheme;
  /// Distinct candidates from the final round, with measured min ESPS.
  std::vector<BlockingCandidate> candidates;
  /// Index into `candidates` of the selection.
  std::size_t selected = 0;
  /// Min efficiency of the all-singletons candidate in the final round.
  /// Candidate and univariate figures are per second or per unit of work,
  /// following settings.cost.
  double univariateMinEsps = 0.0;
  std::size_t rounds = 0;
  std::vector<std::string> warnings;
};

/// Pilot with univariate samplers, cluster the pilot correlations, run an
/// evaluation chain per distinct candidate (same seed, started at the pilot's
/// final state with the pilot covariance), keep the best min ESPS. Ties go to
/// fewer multi-parameter blocks.
AutoBlockResult autoBlock(const SamplingProblem& problem, const AutoBlockSettings& settings);

/// Filtered-likelihood posterior of `model` on the reduced data.
AutoBlockResult autoBlock(const HierarchicalModel& model, const ReducedDataset& data,
                          const AutoBlockSettings& settings);
AutoBlockResult autoBlock(const HierarchicalModel& model, const CaptureDataset& data,
                          const AutoBlockSettings& settings);

}  // namespace hmmcr
