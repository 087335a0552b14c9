#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hmmcr/cjs.hpp"
#include "hmmcr/data.hpp"
#include "hmmcr/hmm.hpp"

namespace hmmcr {

enum class Support { UnitInterval, PositiveReal };

struct Prior {
  enum class Kind { Uniform01, Gamma };
  Kind kind = Kind::Uniform01;
  double shape = 1.0;
  double rate = 1.0;

  static Prior uniform01() { return {}; }
  static Prior gamma(double shape, double rate) { return {Kind::Gamma, shape, rate}; }

  Support support() const {
    return kind == Kind::Uniform01 ? Support::UnitInterval : Support::PositiveReal;
  }
  /// -infinity outside the support.
  double logDensity(double value) const;
};

struct ParameterSpec {
  std::string name;
  Support support = Support::UnitInterval;
  Prior prior;
  /// Free-form tag: "survival", "detection", "transition-weight".
  std::string role;
};

enum class LikelihoodMode { MatrixFilter, CjsClosedForm };

/// Parameter-to-matrix wiring shared by the built-in models and custom
/// configs. Living states come first; a single absorbing "dead" state is
/// appended. Observable living states map, in order, to file symbols
/// 1..m; symbol 0 is "not seen" and is the last emission row.
struct MultistateStructure {
  enum class Survival { Constant, ByOccasion, ByState };
  enum class Detection { Deterministic, Constant, ByState, ByStateOccasion };

  std::string name = "custom";
  /// Required when survival or detection is occasion-indexed.
  std::optional<int> numOccasions;
  std::vector<std::string> stateNames;
  std::vector<bool> observable;
  Survival survival = Survival::Constant;
  /// Movement between living states via Gamma(1,1) weights normalized per
  /// source state (a Dirichlet(1,...,1) column). Off = stay in place.
  bool transitions = false;
  Detection detection = Detection::Constant;
};

/// Transition and emission matrices at one theta. A single entry means the
/// matrix is shared by every occasion.
/// transitions[t-1] moves occasion t-1 -> t; emissions has one entry per
/// occasion.
struct HmmMatrices {
  std::vector<Matrix> transitions;
  std::vector<Matrix> emissions;
};

/// Immutable hierarchical capture-recapture model: theta with priors and the
/// map from theta to per-history HMMs. Every model conditions on first
/// capture: the latent state at the first sighting is the observed one and
/// that observation contributes no emission factor.
class HierarchicalModel {
 public:
  explicit HierarchicalModel(MultistateStructure structure,
                             LikelihoodMode mode = LikelihoodMode::MatrixFilter);

  const std::string& name() const { return structure_.name; }
  const MultistateStructure& structure() const { return structure_; }
  const std::vector<ParameterSpec>& params() const { return params_; }
  std::size_t dimension() const { return params_.size(); }
  std::vector<std::string> parameterNames() const;

  int numLivingStates() const { return static_cast<int>(structure_.stateNames.size()); }
  int numStates() const { return numLivingStates() + 1; }
  int alphabetSize() const { return numObservable_ + 1; }
  std::optional<int> fixedOccasions() const { return structure_.numOccasions; }
  LikelihoodMode likelihoodMode() const { return mode_; }
  bool conditionsOnFirst() const { return true; }
  /// True when the closed-form single-state likelihood applies.
  bool supportsCjs() const;

  HierarchicalModel withMode(LikelihoodMode mode) const;

  bool inSupport(std::span<const double> theta) const;
  double logPrior(std::span<const double> theta) const;

  HmmMatrices matrices(std::span<const double> theta, int numOccasions) const;
  CjsParams cjsParams(std::span<const double> theta, int numOccasions) const;

  /// The embedded HMM for one raw history (initial point mass on the state
  /// implied by its first symbol).
  DiscreteHmmSpec buildHmm(std::span<const double> theta,
                           const ObservationHistory& rawHistory) const;

  int emissionRow(int symbol) const;
  /// Living state observed as `symbol` (symbol >= 1).
  int stateForSymbol(int symbol) const;
  ObservationHistory toEmissionRows(const ObservationHistory& raw) const;

  /// Distribution of a new individual's living state (simulation entry).
  Vector entryDistribution() const;

  /// Throws unless `k`, the alphabet, and all histories suit this model.
  void checkDataset(int numOccasions, int alphabetSize) const;

  /// MCMC starting point: Uniform(0,1) prior draws for unit-interval
  /// parameters, 1 for Gamma weights.
  std::vector<double> drawInitial(std::mt19937_64& rng) const;

 private:
  void checkTheta(std::span<const double> theta) const;
  double survival(std::span<const double> theta, int livingState, int intoOccasion) const;
  double detection(std::span<const double> theta, int livingState, int occasion) const;

  MultistateStructure structure_;
  LikelihoodMode mode_;
  std::vector<ParameterSpec> params_;
  std::vector<int> observableIndex_;  // living state -> symbol-1, or -1
  std::vector<int> stateOfSymbol_;    // symbol-1 -> living state
  int numObservable_ = 0;
  std::size_t survivalOffset_ = 0;
  std::size_t transitionOffset_ = 0;
  std::size_t detectionOffset_ = 0;
};

/// Dataset-bound likelihood evaluator. Histories are translated to emission
/// rows once; each call builds the matrices for theta once and sums weighted
/// per-history terms in a fixed order.
class FilteredLikelihood {
 public:
  FilteredLikelihood(const HierarchicalModel& model, const ReducedDataset& reduced);
  FilteredLikelihood(const HierarchicalModel& model, const CaptureDataset& dataset);

  double operator()(std::span<const double> theta) const;
  std::size_t numTerms() const { return rows_.size(); }

 private:
  const HierarchicalModel* model_;
  std::vector<ObservationHistory> raw_;
  std::vector<ObservationHistory> rows_;
  std::vector<double> weights_;
  std::vector<Eigen::Index> entryState_;
  int numOccasions_;
};

/// Sum over histories of multiplicity * log p(y*_j | theta).
double logLikelihoodFiltered(const HierarchicalModel& model, std::span<const double> theta,
                             const ReducedDataset& reduced);
/// Unreduced sum over every history.
double logLikelihoodFull(const HierarchicalModel& model, std::span<const double> theta,
                         const CaptureDataset& dataset);

/// Latent states for every (individual, occasion). Entries before the first
/// sighting are unused (-1), the first-sighting entry is fixed to the
/// observed state, and later entries are sampled.
class LatentStateMatrix {
 public:
  LatentStateMatrix() = default;
  LatentStateMatrix(int numIndividuals, int numOccasions);

  int numIndividuals() const { return n_; }
  int numOccasions() const { return k_; }
  int at(int i, int t) const { return states_[index(i, t)]; }
  bool isSampled(int i, int t) const { return sampled_[index(i, t)] != 0; }
  /// Throws if the entry is fixed.
  void set(int i, int t, int state);
  std::size_t sampledCount() const;

  /// Marks the masked layout for a dataset and fills fixed entries. Sampled
  /// entries start at 0 until `initializeLatents` runs.
  static LatentStateMatrix forDataset(const HierarchicalModel& model,
                                      const CaptureDataset& dataset);

 private:
  friend LatentStateMatrix initializeLatents(const HierarchicalModel&, std::span<const double>,
                                             const CaptureDataset&);
  std::size_t index(int i, int t) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(k_) +
           static_cast<std::size_t>(t);
  }
  int n_ = 0;
  int k_ = 0;
  std::vector<int> states_;
  std::vector<std::uint8_t> sampled_;
};

/// A positive-probability latent configuration: the most probable state at
/// the last occasion under the filter, then backwards the most probable
/// predecessor of each chosen state.
LatentStateMatrix initializeLatents(const HierarchicalModel& model,
                                    std::span<const double> theta,
                                    const CaptureDataset& dataset);

/// Log of p(theta) * prod_i p(x_i | theta) p(y_i | theta, x_i) at the given
/// latent values; -infinity when a latent value violates a constraint.
double logJoint(const HierarchicalModel& model, std::span<const double> theta,
                const LatentStateMatrix& latents, const CaptureDataset& dataset);

/// Dataset-bound version of the latent-state likelihood (without prior),
/// evaluated from per-theta log matrices.
class JointLikelihood {
 public:
  JointLikelihood(const HierarchicalModel& model, const CaptureDataset& dataset);

  double operator()(std::span<const double> theta, const LatentStateMatrix& latents) const;
  const std::vector<ObservationHistory>& rows() const { return rows_; }

 private:
  const HierarchicalModel* model_;
  std::vector<ObservationHistory> raw_;
  std::vector<ObservationHistory> rows_;
  int numOccasions_;
};

/// Built-in models.
HierarchicalModel buildDipperModel();
HierarchicalModel buildOrchidModel();
HierarchicalModel buildGooseModel();

/// Parses the JSON custom-model config described in the README.
HierarchicalModel parseModelConfig(const std::string& jsonText);
HierarchicalModel readModelConfig(const std::string& path);

/// Built-in by name ("dipper", "orchid", "goose").
HierarchicalModel modelByName(const std::string& name);

}  // namespace hmmcr
