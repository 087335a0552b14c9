#include "hmmcr/samplers.hpp"

#include <cmath>
#include <limits>

#include "hmmcr/error.hpp"

namespace hmmcr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kCovarianceJitter = 1e-10;

bool accept(double logRatio, Rng& rng) {
  if (logRatio >= 0.0) return true;
  if (logRatio == kNegInf || std::isnan(logRatio)) return false;
  return std::log(uniform01(rng)) < logRatio;
}

}  // namespace

double logAcceptanceRatio(double currentLogDensity, double proposedLogDensity) {
  if (proposedLogDensity == kNegInf) return kNegInf;
  return proposedLogDensity - currentLogDensity;
}

StepOutcome univariateRwStep(std::span<double> state, std::size_t index, double scale,
                             double currentLogDensity, const LogDensityFn& logDensity, Rng& rng) {
  const double old = state[index];
  state[index] = old + scale * standardNormal(rng);
  const double proposed = logDensity(state);
  if (accept(logAcceptanceRatio(currentLogDensity, proposed), rng)) {
    return {true, proposed};
  }
  state[index] = old;
  return {false, currentLogDensity};
}

BlockProposal::BlockProposal(Matrix covariance) : covariance_(std::move(covariance)) {
  if (covariance_.rows() != covariance_.cols() || covariance_.rows() == 0) {
    throw Error(ErrorKind::NotPositiveDefinite, "proposal covariance must be square and non-empty");
  }
  if (!covariance_.allFinite() || !covariance_.isApprox(covariance_.transpose(), 1e-9)) {
    throw Error(ErrorKind::NotPositiveDefinite, "proposal covariance is not symmetric");
  }
  Eigen::LLT<Matrix> llt(covariance_);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NotPositiveDefinite, "proposal covariance is not positive definite");
  }
  lower_ = llt.matrixL();
}

BlockProposal BlockProposal::diagonal(const Matrix& covariance) {
  Vector d = covariance.diagonal();
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    if (!(d(j) > 0.0) || !std::isfinite(d(j))) d(j) = kCovarianceJitter;
  }
  return BlockProposal(d.asDiagonal().toDenseMatrix());
}

StepOutcome blockRwStep(std::span<double> state, std::span<const std::size_t> block,
                        const BlockProposal& proposal, double scale, double currentLogDensity,
                        const LogDensityFn& logDensity, Rng& rng) {
  if (block.size() != proposal.size()) {
    throw Error(ErrorKind::DimensionMismatch, "block size does not match proposal covariance");
  }
  const auto d = static_cast<Eigen::Index>(block.size());
  Vector z(d);
  for (Eigen::Index j = 0; j < d; ++j) z(j) = standardNormal(rng);
  const Vector delta = scale * (proposal.cholesky() * z);
  Vector old(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto idx = block[static_cast<std::size_t>(j)];
    old(j) = state[idx];
    state[idx] += delta(j);
  }
  const double proposed = logDensity(state);
  if (accept(logAcceptanceRatio(currentLogDensity, proposed), rng)) {
    return {true, proposed};
  }
  for (Eigen::Index j = 0; j < d; ++j) state[block[static_cast<std::size_t>(j)]] = old(j);
  return {false, currentLogDensity};
}

double adaptationWeight(int timesAdapted) {
  return 1.0 / std::pow(static_cast<double>(timesAdapted) + 3.0, 0.8);
}

double adaptScale(double scale, double acceptanceRate, double target, int timesAdapted) {
  return scale * std::exp(10.0 * adaptationWeight(timesAdapted) * (acceptanceRate - target));
}

// ---------------------------------------------------------------------------

UnivariateSampler::UnivariateSampler(std::size_t index, double initialScale)
    : index_(index), scale_(initialScale) {}

StepOutcome UnivariateSampler::step(std::span<double> state, double current,
                                    const LogDensityFn& logDensity, Rng& rng) {
  const StepOutcome out = univariateRwStep(state, index_, scale_, current, logDensity, rng);
  ++steps_;
  ++windowSteps_;
  if (out.accepted) {
    ++accepted_;
    ++windowAccepted_;
  }
  return out;
}

void UnivariateSampler::afterIteration(const AdaptationSettings& settings) {
  if (!settings.enabled || windowSteps_ < settings.interval) return;
  const double rate = static_cast<double>(windowAccepted_) / windowSteps_;
  scale_ = adaptScale(scale_, rate, settings.univariateTarget, timesAdapted_);
  ++timesAdapted_;
  windowAccepted_ = 0;
  windowSteps_ = 0;
}

double UnivariateSampler::acceptanceRate() const {
  return steps_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(steps_);
}

BlockSampler::BlockSampler(std::vector<std::size_t> indices, Matrix initialCovariance)
    : indices_(std::move(indices)),
      proposal_(std::move(initialCovariance)),
      scale_(2.38 / std::sqrt(static_cast<double>(indices_.size()))) {
  if (proposal_.size() != indices_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "initial covariance does not match block size");
  }
}

StepOutcome BlockSampler::step(std::span<double> state, double current,
                               const LogDensityFn& logDensity, Rng& rng) {
  const StepOutcome out = blockRwStep(state, indices_, proposal_, scale_, current, logDensity, rng);
  ++steps_;
  ++windowSteps_;
  if (out.accepted) {
    ++accepted_;
    ++windowAccepted_;
  }
  return out;
}

void BlockSampler::afterIteration(std::span<const double> state,
                                  const AdaptationSettings& settings) {
  if (!settings.enabled) return;
  for (std::size_t j : indices_) window_.push_back(state[j]);
  if (windowSteps_ < settings.interval) return;

  const auto d = static_cast<Eigen::Index>(indices_.size());
  const auto rows = static_cast<Eigen::Index>(window_.size()) / d;
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      draws(window_.data(), rows, d);
  const Eigen::RowVectorXd mean = draws.colwise().mean();
  const Matrix centered = draws.rowwise() - mean;
  const Matrix empirical = (centered.transpose() * centered) / std::max<double>(rows - 1, 1.0);

  const double gamma = adaptationWeight(timesAdapted_);
  Matrix updated = proposal_.covariance() + gamma * (empirical - proposal_.covariance());
  updated = 0.5 * (updated + updated.transpose());
  updated.diagonal().array() += kCovarianceJitter;
  try {
    proposal_ = BlockProposal(updated);
  } catch (const Error&) {
    proposal_ = BlockProposal::diagonal(updated);
    ++fallbacks_;
  }

  const double rate = static_cast<double>(windowAccepted_) / windowSteps_;
  scale_ = adaptScale(scale_, rate, settings.blockTarget, timesAdapted_);
  ++timesAdapted_;
  windowAccepted_ = 0;
  windowSteps_ = 0;
  window_.clear();
}

double BlockSampler::acceptanceRate() const {
  return steps_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(steps_);
}

// ---------------------------------------------------------------------------

Vector latentConditional(const HmmMatrices& matrices, const LatentStateMatrix& latents,
                         const ObservationHistory& emissionRows, int i, int t) {
  if (!latents.isSampled(i, t)) {
    throw Error(ErrorKind::InconsistentLatentState,
                "latent (" + std::to_string(i) + "," + std::to_string(t) + ") is not sampled");
  }
  const auto& transition = [&](int u) -> const Matrix& {
    return matrices.transitions.size() == 1 ? matrices.transitions.front()
                                            : matrices.transitions[static_cast<std::size_t>(u - 1)];
  };
  const Matrix& z = matrices.emissions.size() == 1 ? matrices.emissions.front()
                                                   : matrices.emissions[static_cast<std::size_t>(t)];
  const int prev = latents.at(i, t - 1);
  const int row = emissionRows.codes[static_cast<std::size_t>(t)];
  const auto states = z.cols();
  Vector w(states);
  for (Eigen::Index x = 0; x < states; ++x) {
    double v = transition(t)(x, prev) * z(row, x);
    if (t + 1 < latents.numOccasions()) v *= transition(t + 1)(latents.at(i, t + 1), x);
    w(x) = v;
  }
  const double total = w.sum();
  if (!(total > 0.0)) {
    throw Error(ErrorKind::InconsistentLatentState,
                "latent (" + std::to_string(i) + "," + std::to_string(t) +
                    ") has zero conditional probability for every state");
  }
  return w / total;
}

int latentGibbsStep(const HmmMatrices& matrices, LatentStateMatrix& latents,
                    const ObservationHistory& emissionRows, int i, int t, Rng& rng) {
  const Vector probs = latentConditional(matrices, latents, emissionRows, i, t);
  const int x = drawCategorical(rng, probs, 1.0);
  latents.set(i, t, x);
  return x;
}

}  // namespace hmmcr
