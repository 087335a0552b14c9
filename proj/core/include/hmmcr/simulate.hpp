#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "hmmcr/data.hpp"
#include "hmmcr/model.hpp"

namespace hmmcr {

/// Redraw cap for one individual that is never sighted.
inline constexpr std::int64_t kMaxSimulationAttempts = 1'000'000;

struct SimulationResult {
  CaptureDataset dataset;
  /// Individuals discarded because they were never sighted.
  std::int64_t redraws = 0;
  std::string redrawPolicy;
};

/// Draws `n` capture histories over `k` occasions from the model's
/// generative process. Each individual enters at a uniform occasion in
/// [0, k-2] in a uniformly chosen living state and is then observed at every
/// occasion from entry on. Never-sighted individuals are redrawn; after
/// kMaxSimulationAttempts failures for one individual the call throws
/// SimulationRejected.
SimulationResult simulateDataset(const HierarchicalModel& model, std::span<const double> theta,
                                 int n, int k, std::uint64_t seed);

}  // namespace hmmcr
