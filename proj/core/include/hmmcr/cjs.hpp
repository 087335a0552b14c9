#pragma once

#include <vector>

#include "hmmcr/hmm.hpp"

namespace hmmcr {

/// Single-state capture-recapture parameters, indexed by 0-based occasion.
/// survival[t] = Pr(alive at t+1 | alive at t), t in [0, k-1);
/// detection[t] = Pr(seen at t | alive at t), t in [0, k).
struct CjsParams {
  std::vector<double> survival;
  std::vector<double> detection;

  static CjsParams constant(double survival, double detection, int numOccasions);
};

/// Closed-form Cormack-Jolly-Seber log-likelihood, conditional on first
/// capture at `history.firstOccasion`. Codes are binary: 1 seen, 0 not seen.
/// The tail after the last sighting is handled by the backward
/// never-seen-again probability chi.
double cjsLogLik(const CjsParams& params, const ObservationHistory& history);

/// Log-space tables for one parameter set, so repeated evaluation over many
/// histories needs only additions. Histories are not re-validated.
class CjsTable {
 public:
  CjsTable(const CjsParams& params, int numOccasions);

  double logLik(const ObservationHistory& history) const;

 private:
  std::vector<double> logSurvival_;
  std::vector<double> logDetected_;
  std::vector<double> logMissed_;
  std::vector<double> logChi_;
};

/// The two-state (alive, dead) absorbing HMM with the same likelihood as
/// `cjsLogLik`. Emission row 0 is "seen", row 1 "not seen"; starts alive and
/// conditions on the first sighting.
DiscreteHmmSpec cjsAsHmm(const CjsParams& params, int numOccasions);

/// Binary CJS codes (1 seen / 0 not seen) to `cjsAsHmm` emission rows.
ObservationHistory cjsToHmmCodes(const ObservationHistory& history);

}  // namespace hmmcr
