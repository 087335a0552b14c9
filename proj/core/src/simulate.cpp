#include "hmmcr/simulate.hpp"

#include "hmmcr/error.hpp"
#include "hmmcr/random.hpp"

namespace hmmcr {

SimulationResult simulateDataset(const HierarchicalModel& model, std::span<const double> theta,
                                 int n, int k, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "simulation needs n >= 1");
  model.checkDataset(k, model.alphabetSize());
  if (!model.inSupport(theta)) {
    throw Error(ErrorKind::InvalidArgument, "theta outside the prior support");
  }
  const HmmMatrices m = model.matrices(theta, k);
  const auto transition = [&](int t) -> const Matrix& {
    return m.transitions.size() == 1 ? m.transitions.front()
                                     : m.transitions[static_cast<std::size_t>(t - 1)];
  };
  const auto emission = [&](int t) -> const Matrix& {
    return m.emissions.size() == 1 ? m.emissions.front()
                                   : m.emissions[static_cast<std::size_t>(t)];
  };
  const Vector entry = model.entryDistribution();
  const int notSeenRow = model.alphabetSize() - 1;

  Rng rng(seed);
  std::uniform_int_distribution<int> entryOccasion(0, k - 2);

  SimulationResult result;
  result.redrawPolicy = "redraw never-sighted individuals, at most " +
                        std::to_string(kMaxSimulationAttempts) + " attempts each";
  result.dataset.numOccasions = k;
  result.dataset.alphabetSize = model.alphabetSize();
  result.dataset.histories.reserve(static_cast<std::size_t>(n));

  std::vector<int> codes(static_cast<std::size_t>(k));
  for (int i = 0; i < n; ++i) {
    bool accepted = false;
    for (std::int64_t attempt = 0; attempt < kMaxSimulationAttempts; ++attempt) {
      std::fill(codes.begin(), codes.end(), 0);
      const int e = entryOccasion(rng);
      int state = drawCategorical(rng, entry, 1.0);
      for (int t = e; t < k; ++t) {
        if (t > e) state = drawCategorical(rng, transition(t).col(state), 1.0);
        const int row = drawCategorical(rng, emission(t).col(state), 1.0);
        codes[static_cast<std::size_t>(t)] = row == notSeenRow ? 0 : row + 1;
      }
      const int first = firstSighting(codes);
      if (first >= 0) {
        result.dataset.histories.push_back({codes, first});
        accepted = true;
        break;
      }
      ++result.redraws;
    }
    if (!accepted) {
      throw Error(ErrorKind::SimulationRejected,
                  "individual " + std::to_string(i) + " was never sighted in " +
                      std::to_string(kMaxSimulationAttempts) +
                      " attempts; detection may be zero");
    }
  }
  result.dataset.lineNumbers.assign(result.dataset.histories.size(), 0);
  return result;
}

}  // namespace hmmcr
