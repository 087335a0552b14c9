#include "hmmcr/hmm.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "hmmcr/error.hpp"

namespace hmmcr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Running likelihood product is folded into the log accumulator below this.
constexpr double kRescaleThreshold = 1e-280;

bool isProbability(double v) {
  return v >= -kStochasticTolerance && v <= 1.0 + kStochasticTolerance;
}

}  // namespace

void checkColumnStochastic(const Matrix& m, const char* what) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!isProbability(m(i, j))) {
        throw Error(ErrorKind::NotStochastic,
                    std::string(what) + ": entry (" + std::to_string(i) + "," +
                        std::to_string(j) + ") outside [0,1]");
      }
      sum += m(i, j);
    }
    if (std::abs(sum - 1.0) > kStochasticTolerance) {
      throw Error(ErrorKind::NotStochastic,
                  std::string(what) + ": column " + std::to_string(j) +
                      " sums to " + std::to_string(sum));
    }
  }
}

DiscreteHmmSpec::DiscreteHmmSpec(Vector initialDist,
                                 std::vector<Matrix> transitions,
                                 std::vector<Matrix> emissions,
                                 int numOccasions, bool conditionOnFirst)
    : DiscreteHmmSpec(std::move(initialDist),
                      std::make_shared<const std::vector<Matrix>>(std::move(transitions)),
                      std::make_shared<const std::vector<Matrix>>(std::move(emissions)),
                      numOccasions, conditionOnFirst) {
  const auto states = initial_.size();
  if (numOccasions_ < 1) {
    throw Error(ErrorKind::InvalidArgument, "numOccasions must be positive");
  }
  if (states < 1) {
    throw Error(ErrorKind::InvalidArgument, "numStates must be positive");
  }
  const auto nT = transitions_->size();
  if (!(nT == 1 || nT == static_cast<std::size_t>(numOccasions_ - 1) ||
        (nT == 0 && numOccasions_ == 1))) {
    throw Error(ErrorKind::DimensionMismatch,
                "expected 1 or numOccasions-1 transition matrices, got " +
                    std::to_string(nT));
  }
  const auto nZ = emissions_->size();
  if (!(nZ == 1 || nZ == static_cast<std::size_t>(numOccasions_))) {
    throw Error(ErrorKind::DimensionMismatch,
                "expected 1 or numOccasions emission matrices, got " +
                    std::to_string(nZ));
  }
  for (const auto& t : *transitions_) {
    if (t.rows() != states || t.cols() != states) {
      throw Error(ErrorKind::DimensionMismatch, "transition matrix must be numStates x numStates");
    }
    checkColumnStochastic(t, "transition");
  }
  const auto obs = emissions_->front().rows();
  if (obs < 1) throw Error(ErrorKind::InvalidArgument, "numObs must be positive");
  for (const auto& z : *emissions_) {
    if (z.rows() != obs || z.cols() != states) {
      throw Error(ErrorKind::DimensionMismatch, "emission matrix must be numObs x numStates");
    }
    checkColumnStochastic(z, "emission");
  }
}

DiscreteHmmSpec::DiscreteHmmSpec(Vector initialDist,
                                 std::shared_ptr<const std::vector<Matrix>> transitions,
                                 std::shared_ptr<const std::vector<Matrix>> emissions,
                                 int numOccasions, bool conditionOnFirst)
    : initial_(std::move(initialDist)),
      transitions_(std::move(transitions)),
      emissions_(std::move(emissions)),
      numOccasions_(numOccasions),
      conditionOnFirst_(conditionOnFirst) {
  if (emissions_->empty()) {
    throw Error(ErrorKind::InvalidArgument, "at least one emission matrix is required");
  }
  validateInitial();
}

DiscreteHmmSpec DiscreteHmmSpec::homogeneous(Vector initialDist, Matrix transition,
                                             Matrix emission, int numOccasions,
                                             bool conditionOnFirst) {
  std::vector<Matrix> ts;
  ts.push_back(std::move(transition));
  std::vector<Matrix> zs;
  zs.push_back(std::move(emission));
  return DiscreteHmmSpec(std::move(initialDist), std::move(ts), std::move(zs),
                         numOccasions, conditionOnFirst);
}

void DiscreteHmmSpec::validateInitial() const {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < initial_.size(); ++i) {
    if (!isProbability(initial_(i))) {
      throw Error(ErrorKind::NotStochastic, "initial distribution entry outside [0,1]");
    }
    sum += initial_(i);
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance) {
    throw Error(ErrorKind::NotStochastic,
                "initial distribution sums to " + std::to_string(sum));
  }
}

const Matrix& DiscreteHmmSpec::transition(int t) const {
  return transitions_->size() == 1 ? transitions_->front()
                                   : (*transitions_)[static_cast<std::size_t>(t - 1)];
}

const Matrix& DiscreteHmmSpec::emission(int t) const {
  return emissions_->size() == 1 ? emissions_->front()
                                 : (*emissions_)[static_cast<std::size_t>(t)];
}

DiscreteHmmSpec DiscreteHmmSpec::withInitial(Vector initialDist) const {
  if (initialDist.size() != initial_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "initial distribution has wrong length");
  }
  return DiscreteHmmSpec(std::move(initialDist), transitions_, emissions_,
                         numOccasions_, conditionOnFirst_);
}

void checkCompatible(const DiscreteHmmSpec& hmm, const ObservationHistory& history) {
  if (history.length() != hmm.numOccasions()) {
    throw Error(ErrorKind::DimensionMismatch,
                "history length " + std::to_string(history.length()) +
                    " does not match " + std::to_string(hmm.numOccasions()) +
                    " occasions");
  }
  if (history.firstOccasion < 0 || history.firstOccasion >= history.length()) {
    throw Error(ErrorKind::DimensionMismatch, "firstOccasion outside history");
  }
  for (int t = history.firstOccasion; t < history.length(); ++t) {
    const int c = history.codes[static_cast<std::size_t>(t)];
    if (c < 0 || c >= hmm.numObs()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "observation code " + std::to_string(c) + " at occasion " +
                      std::to_string(t) + " outside alphabet of size " +
                      std::to_string(hmm.numObs()));
    }
  }
}

double forwardFilterLogLik(const DiscreteHmmSpec& hmm, const ObservationHistory& history) {
  checkCompatible(hmm, history);
  const int first = history.firstOccasion;
  Vector predicted = hmm.initialDist();
  Vector filtered(predicted.size());
  double product = 1.0;
  double logAcc = 0.0;
  for (int t = first; t < history.length(); ++t) {
    if (t > first) predicted.noalias() = hmm.transition(t) * filtered;
    if (t == first && hmm.conditionsOnFirst()) {
      filtered = predicted;
      continue;
    }
    const auto row = hmm.emission(t).row(history.codes[static_cast<std::size_t>(t)]);
    const double lik = row.dot(predicted);
    if (!(lik > 0.0)) return kNegInf;
    filtered = row.transpose().cwiseProduct(predicted) / lik;
    product *= lik;
    if (product < kRescaleThreshold) {
      logAcc += std::log(product);
      product = 1.0;
    }
  }
  return logAcc + std::log(product);
}

std::vector<FilterStep> forwardFilterDistributions(const DiscreteHmmSpec& hmm,
                                                   const ObservationHistory& history) {
  checkCompatible(hmm, history);
  std::vector<FilterStep> steps;
  const int first = history.firstOccasion;
  steps.reserve(static_cast<std::size_t>(history.length() - first));
  Vector predicted = hmm.initialDist();
  for (int t = first; t < history.length(); ++t) {
    if (t > first) predicted = hmm.transition(t) * steps.back().filtered;
    FilterStep step;
    step.occasion = t;
    step.predicted = predicted;
    if (t == first && hmm.conditionsOnFirst()) {
      step.filtered = predicted;
      step.conditionalLikelihood = 1.0;
    } else {
      const auto row = hmm.emission(t).row(history.codes[static_cast<std::size_t>(t)]);
      step.conditionalLikelihood = row.dot(predicted);
      if (step.conditionalLikelihood > 0.0) {
        step.filtered = row.transpose().cwiseProduct(predicted) / step.conditionalLikelihood;
      } else {
        step.conditionalLikelihood = 0.0;
        step.filtered = predicted;
        steps.push_back(std::move(step));
        break;
      }
    }
    steps.push_back(std::move(step));
  }
  return steps;
}

double latentEnumerationLogLik(const DiscreteHmmSpec& hmm, const ObservationHistory& history,
                               std::uint64_t cap) {
  checkCompatible(hmm, history);
  const int first = history.firstOccasion;
  const int k = history.length();
  const auto states = static_cast<std::uint64_t>(hmm.numStates());
  std::uint64_t paths = 1;
  for (int t = first; t < k; ++t) {
    if (paths > cap / states) {
      throw Error(ErrorKind::EnumerationCapExceeded,
                  "latent enumeration needs more than " + std::to_string(cap) +
                      " paths; use forwardFilterLogLik");
    }
    paths *= states;
  }

  auto emissionFactor = [&](int t, int x) {
    if (t == first && hmm.conditionsOnFirst()) return 1.0;
    return hmm.emission(t)(history.codes[static_cast<std::size_t>(t)], x);
  };

  // Depth-first over paths, carrying the partial product.
  long double total = 0.0L;
  std::function<void(int, int, double)> visit = [&](int t, int prev, double weight) {
    if (t == k) {
      total += weight;
      return;
    }
    for (int x = 0; x < hmm.numStates(); ++x) {
      const double step = (t == first) ? hmm.initialDist()(x) : hmm.transition(t)(x, prev);
      const double w = weight * step * emissionFactor(t, x);
      if (w == 0.0) continue;
      visit(t + 1, x, w);
    }
  };
  visit(first, -1, 1.0);
  if (total <= 0.0L) return kNegInf;
  return static_cast<double>(std::log(total));
}

}  // namespace hmmcr
