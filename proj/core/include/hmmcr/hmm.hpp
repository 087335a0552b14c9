#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace hmmcr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Column sums of transition/emission matrices and the initial distribution
/// must be within this of 1.
inline constexpr double kStochasticTolerance = 1e-12;

/// Default limit on the number of latent paths the enumeration oracle visits.
inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// A sequence of observation codes over k occasions. For hmm-core the codes
/// are 0-based emission-matrix rows; datasets store raw file symbols instead
/// (0 = not seen) and models translate them.
struct ObservationHistory {
  std::vector<int> codes;
  /// 0-based occasion the history is evaluated from.
  int firstOccasion = 0;

  int length() const { return static_cast<int>(codes.size()); }

  friend bool operator==(const ObservationHistory&, const ObservationHistory&) = default;
};

/// Discrete HMM over a fixed number of occasions.
///
/// transition(t)(i, j) = Pr(X_t = i | X_{t-1} = j) for t >= 1, and
/// emission(t)(i, j) = Pr(Y_t = i | X_t = j). Columns index the conditioning
/// state. Passing a single matrix makes that component time-homogeneous.
///
/// `initialDist` is the state distribution at the history's first occasion.
/// With `conditionOnFirst`, the observation at the first occasion contributes
/// no emission factor (the likelihood is conditional on first capture).
///
/// Matrices are shared between copies, so `withInitial` is cheap.
class DiscreteHmmSpec {
 public:
  DiscreteHmmSpec(Vector initialDist, std::vector<Matrix> transitions,
                  std::vector<Matrix> emissions, int numOccasions,
                  bool conditionOnFirst = false);

  static DiscreteHmmSpec homogeneous(Vector initialDist, Matrix transition,
                                     Matrix emission, int numOccasions,
                                     bool conditionOnFirst = false);

  int numStates() const { return static_cast<int>(initial_.size()); }
  int numObs() const { return static_cast<int>(emissions_->front().rows()); }
  int numOccasions() const { return numOccasions_; }
  bool conditionsOnFirst() const { return conditionOnFirst_; }

  const Vector& initialDist() const { return initial_; }
  /// Transition into occasion t (t in [1, numOccasions)).
  const Matrix& transition(int t) const;
  const Matrix& emission(int t) const;

  /// Same matrices, different first-occasion distribution.
  DiscreteHmmSpec withInitial(Vector initialDist) const;

 private:
  DiscreteHmmSpec(Vector initialDist,
                  std::shared_ptr<const std::vector<Matrix>> transitions,
                  std::shared_ptr<const std::vector<Matrix>> emissions,
                  int numOccasions, bool conditionOnFirst);

  void validateInitial() const;

  Vector initial_;
  std::shared_ptr<const std::vector<Matrix>> transitions_;
  std::shared_ptr<const std::vector<Matrix>> emissions_;
  int numOccasions_;
  bool conditionOnFirst_;
};

/// One filter step: predicted P_t = Pr(X_t | y_{<t}), filtered
/// Q_t = Pr(X_t | y_{<=t}) and the conditional likelihood L_t.
struct FilterStep {
  int occasion = 0;
  Vector predicted;
  Vector filtered;
  double conditionalLikelihood = 0.0;
};

/// Marginal log-likelihood of `history` by matrix forward filtering.
/// Returns -infinity for a history with probability zero.
double forwardFilterLogLik(const DiscreteHmmSpec& hmm,
                           const ObservationHistory& history);

/// Per-occasion filter quantities from the first occasion onward. If some
/// L_t is zero the sequence stops at that step, whose `filtered` vector is
/// left equal to `predicted`.
std::vector<FilterStep> forwardFilterDistributions(
    const DiscreteHmmSpec& hmm, const ObservationHistory& history);

/// Brute-force log-likelihood summing over every latent path. Test oracle;
/// throws EnumerationCapExceeded when numStates^length exceeds `cap`.
double latentEnumerationLogLik(const DiscreteHmmSpec& hmm,
                               const ObservationHistory& history,
                               std::uint64_t cap = kDefaultEnumerationCap);

/// Throws DimensionMismatch unless `history` can be evaluated under `hmm`.
void checkCompatible(const DiscreteHmmSpec& hmm,
                     const ObservationHistory& history);

/// Throws NotStochastic unless every column of `m` is a probability vector.
void checkColumnStochastic(const Matrix& m, const char* what);

}  // namespace hmmcr
