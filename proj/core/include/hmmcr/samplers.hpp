#pragma once

#include <span>
#include <vector>

#include "hmmcr/hmm.hpp"
#include "hmmcr/model.hpp"
#include "hmmcr/random.hpp"
#include "hmmcr/target.hpp"

namespace hmmcr {

struct StepOutcome {
  bool accepted = false;
  /// Log density at the state after the step.
  double logDensity = 0.0;
};

/// log of the Metropolis ratio for a symmetric proposal. Swapping the
/// arguments negates it; -infinity when the proposal has zero density.
double logAcceptanceRatio(double currentLogDensity, double proposedLogDensity);

/// Random-walk Metropolis on one coordinate with a N(0, scale^2) proposal.
/// `state` is updated in place on acceptance and left unchanged otherwise.
StepOutcome univariateRwStep(std::span<double> state, std::size_t index, double scale,
                             double currentLogDensity, const LogDensityFn& logDensity, Rng& rng);

/// Multivariate normal proposal covariance with its Cholesky factor.
class BlockProposal {
 public:
  /// Throws NotPositiveDefinite if `covariance` is not symmetric positive
  /// definite.
  explicit BlockProposal(Matrix covariance);

  /// Keeps only the (positive) diagonal of `covariance`.
  static BlockProposal diagonal(const Matrix& covariance);

  std::size_t size() const { return static_cast<std::size_t>(covariance_.rows()); }
  const Matrix& covariance() const { return covariance_; }
  const Matrix& cholesky() const { return lower_; }

 private:
  Matrix covariance_;
  Matrix lower_;
};

/// Random-walk Metropolis on the coordinates in `block` with a
/// N(0, scale^2 * proposal.covariance()) joint proposal.
StepOutcome blockRwStep(std::span<double> state, std::span<const std::size_t> block,
                        const BlockProposal& proposal, double scale, double currentLogDensity,
                        const LogDensityFn& logDensity, Rng& rng);

struct AdaptationSettings {
  bool enabled = true;
  /// Iterations between adaptations.
  int interval = 200;
  double univariateTarget = 0.44;
  double blockTarget = 0.234;
};

/// Diminishing adaptation weight after `timesAdapted` previous adaptations.
double adaptationWeight(int timesAdapted);

/// Multiplies `scale` by exp(10 * weight * (acceptanceRate - target)).
double adaptScale(double scale, double acceptanceRate, double target, int timesAdapted);

/// Adaptive univariate random-walk sampler.
class UnivariateSampler {
 public:
  UnivariateSampler(std::size_t index, double initialScale);

  StepOutcome step(std::span<double> state, double current, const LogDensityFn& logDensity,
                   Rng& rng);
  /// Adapts every `settings.interval` calls.
  void afterIteration(const AdaptationSettings& settings);

  std::size_t index() const { return index_; }
  double scale() const { return scale_; }
  double acceptanceRate() const;

 private:
  std::size_t index_;
  double scale_;
  int windowAccepted_ = 0;
  int windowSteps_ = 0;
  int timesAdapted_ = 0;
  long long accepted_ = 0;
  long long steps_ = 0;
};

/// Adaptive block random-walk sampler. The covariance tracks the empirical
/// covariance of the block's recent draws and the global scale targets the
/// block acceptance rate.
class BlockSampler {
 public:
  BlockSampler(std::vector<std::size_t> indices, Matrix initialCovariance);

  StepOutcome step(std::span<double> state, double current, const LogDensityFn& logDensity,
                   Rng& rng);
  /// Records the block's current values and adapts at window boundaries.
  void afterIteration(std::span<const double> state, const AdaptationSettings& settings);

  const std::vector<std::size_t>& indices() const { return indices_; }
  const BlockProposal& proposal() const { return proposal_; }
  double scale() const { return scale_; }
  double acceptanceRate() const;
  /// Number of adaptations that fell back to a diagonal covariance.
  int diagonalFallbacks() const { return fallbacks_; }

 private:
  std::vector<std::size_t> indices_;
  BlockProposal proposal_;
  double scale_;
  std::vector<double> window_;  // row-major: windowSteps_ x block size
  int windowAccepted_ = 0;
  int windowSteps_ = 0;
  int timesAdapted_ = 0;
  int fallbacks_ = 0;
  long long accepted_ = 0;
  long long steps_ = 0;
};

/// Normalized full conditional of latent (i, t) given its neighbours and
/// observation, from one theta's matrices.
Vector latentConditional(const HmmMatrices& matrices, const LatentStateMatrix& latents,
                         const ObservationHistory& emissionRows, int i, int t);

/// Categorical Gibbs update of latent (i, t). Throws InconsistentLatentState
/// when every state has zero conditional weight.
int latentGibbsStep(const HmmMatrices& matrices, LatentStateMatrix& latents,
                    const ObservationHistory& emissionRows, int i, int t, Rng& rng);

}  // namespace hmmcr
