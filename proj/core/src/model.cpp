#include "hmmcr/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hmmcr/error.hpp"

namespace hmmcr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string indexName(const std::string& base, int a) {
  return base + "[" + std::to_string(a) + "]";
}

std::string indexName(const std::string& base, int a, int b) {
  return base + "[" + std::to_string(a) + "," + std::to_string(b) + "]";
}

bool occasionIndexed(const MultistateStructure& s) {
  return s.survival == MultistateStructure::Survival::ByOccasion ||
         s.detection == MultistateStructure::Detection::ByStateOccasion;
}

}  // namespace

double Prior::logDensity(double value) const {
  switch (kind) {
    case Kind::Uniform01:
      return (value >= 0.0 && value <= 1.0) ? 0.0 : kNegInf;
    case Kind::Gamma:
      if (!(value > 0.0)) return kNegInf;
      return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(value) -
             rate * value;
  }
  return kNegInf;
}

HierarchicalModel::HierarchicalModel(MultistateStructure structure, LikelihoodMode mode)
    : structure_(std::move(structure)), mode_(mode) {
  const int living = numLivingStates();
  if (living < 1) throw Error(ErrorKind::InvalidArgument, "model needs at least one living state");
  if (structure_.observable.size() != structure_.stateNames.size()) {
    throw Error(ErrorKind::InvalidArgument, "observable flags must match the state list");
  }
  if (occasionIndexed(structure_) && !structure_.numOccasions) {
    throw Error(ErrorKind::InvalidArgument,
                "occasion-indexed parameters need a fixed number of occasions");
  }
  if (structure_.numOccasions && *structure_.numOccasions < 2) {
    throw Error(ErrorKind::InvalidArgument, "models need at least two occasions");
  }

  observableIndex_.assign(static_cast<std::size_t>(living), -1);
  for (int s = 0; s < living; ++s) {
    if (structure_.observable[static_cast<std::size_t>(s)]) {
      observableIndex_[static_cast<std::size_t>(s)] = numObservable_++;
      stateOfSymbol_.push_back(s);
    }
  }
  if (numObservable_ == 0) {
    throw Error(ErrorKind::InvalidArgument, "model needs at least one observable state");
  }
  if (alphabetSize() > 10) {
    throw Error(ErrorKind::InvalidArgument, "at most nine observable states are supported");
  }

  using Survival = MultistateStructure::Survival;
  using Detection = MultistateStructure::Detection;
  const int k = structure_.numOccasions.value_or(0);

  survivalOffset_ = params_.size();
  switch (structure_.survival) {
    case Survival::Constant:
      params_.push_back({"phi", Support::UnitInterval, Prior::uniform01(), "survival"});
      break;
    case Survival::ByOccasion:
      for (int t = 2; t <= k; ++t) {
        params_.push_back({indexName("phi", t), Support::UnitInterval, Prior::uniform01(), "survival"});
      }
      break;
    case Survival::ByState:
      for (int s = 1; s <= living; ++s) {
        params_.push_back({indexName("phi", s), Support::UnitInterval, Prior::uniform01(), "survival"});
      }
      break;
  }

  transitionOffset_ = params_.size();
  if (structure_.transitions) {
    for (int s = 1; s <= living; ++s) {
      for (int r = 1; r <= living; ++r) {
        params_.push_back({indexName("psi", r, s), Support::PositiveReal, Prior::gamma(1.0, 1.0),
                           "transition-weight"});
      }
    }
  }

  detectionOffset_ = params_.size();
  switch (structure_.detection) {
    case Detection::Deterministic:
      break;
    case Detection::Constant:
      params_.push_back({"p", Support::UnitInterval, Prior::uniform01(), "detection"});
      break;
    case Detection::ByState:
      for (int s = 0; s < living; ++s) {
        if (observableIndex_[static_cast<std::size_t>(s)] < 0) continue;
        params_.push_back({indexName("p", s + 1), Support::UnitInterval, Prior::uniform01(), "detection"});
      }
      break;
    case Detection::ByStateOccasion:
      for (int s = 0; s < living; ++s) {
        if (observableIndex_[static_cast<std::size_t>(s)] < 0) continue;
        for (int t = 2; t <= k; ++t) {
          params_.push_back({indexName("p", s + 1, t), Support::UnitInterval, Prior::uniform01(),
                             "detection"});
        }
      }
      break;
  }

  if (mode_ == LikelihoodMode::CjsClosedForm && !supportsCjs()) {
    throw Error(ErrorKind::InvalidArgument,
                "closed-form likelihood needs one observable living state, no transitions, "
                "and estimated detection");
  }
}

std::vector<std::string> HierarchicalModel::parameterNames() const {
  std::vector<std::string> names;
  names.reserve(params_.size());
  for (const auto& p : params_) names.push_back(p.name);
  return names;
}

bool HierarchicalModel::supportsCjs() const {
  return numLivingStates() == 1 && numObservable_ == 1 && !structure_.transitions &&
         structure_.detection != MultistateStructure::Detection::Deterministic;
}

HierarchicalModel HierarchicalModel::withMode(LikelihoodMode mode) const {
  return HierarchicalModel(structure_, mode);
}

void HierarchicalModel::checkTheta(std::span<const double> theta) const {
  if (theta.size() != params_.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "theta has " + std::to_string(theta.size()) + " entries, model " + name() +
                    " has " + std::to_string(params_.size()) + " parameters");
  }
}

bool HierarchicalModel::inSupport(std::span<const double> theta) const {
  checkTheta(theta);
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double v = theta[j];
    if (params_[j].support == Support::UnitInterval ? !(v >= 0.0 && v <= 1.0) : !(v > 0.0)) {
      return false;
    }
  }
  return true;
}

double HierarchicalModel::logPrior(std::span<const double> theta) const {
  checkTheta(theta);
  double lp = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    lp += params_[j].prior.logDensity(theta[j]);
    if (lp == kNegInf) return kNegInf;
  }
  return lp;
}

double HierarchicalModel::survival(std::span<const double> theta, int livingState,
                                   int intoOccasion) const {
  using Survival = MultistateStructure::Survival;
  switch (structure_.survival) {
    case Survival::Constant: return theta[survivalOffset_];
    case Survival::ByOccasion:
      return theta[survivalOffset_ + static_cast<std::size_t>(intoOccasion - 1)];
    case Survival::ByState: return theta[survivalOffset_ + static_cast<std::size_t>(livingState)];
  }
  return 0.0;
}

double HierarchicalModel::detection(std::span<const double> theta, int livingState,
                                    int occasion) const {
  using Detection = MultistateStructure::Detection;
  const int obs = observableIndex_[static_cast<std::size_t>(livingState)];
  if (obs < 0) return 0.0;
  switch (structure_.detection) {
    case Detection::Deterministic: return 1.0;
    case Detection::Constant: return theta[detectionOffset_];
    case Detection::ByState: return theta[detectionOffset_ + static_cast<std::size_t>(obs)];
    case Detection::ByStateOccasion: {
      // Occasion 0 has no detection parameter (it is always the conditioned
      // first sighting); it borrows occasion 1's for simulation.
      const int k = *structure_.numOccasions;
      const int u = std::max(occasion, 1);
      return theta[detectionOffset_ + static_cast<std::size_t>(obs * (k - 1) + (u - 1))];
    }
  }
  return 0.0;
}

HmmMatrices HierarchicalModel::matrices(std::span<const double> theta, int numOccasions) const {
  checkTheta(theta);
  if (structure_.numOccasions && *structure_.numOccasions != numOccasions) {
    throw Error(ErrorKind::DimensionMismatch,
                "model " + name() + " is defined for " +
                    std::to_string(*structure_.numOccasions) + " occasions, not " +
                    std::to_string(numOccasions));
  }
  const int living = numLivingStates();
  const int states = numStates();
  const int dead = living;

  // Normalized Dirichlet columns.
  Matrix psi = Matrix::Identity(living, living);
  if (structure_.transitions) {
    for (int s = 0; s < living; ++s) {
      double total = 0.0;
      for (int r = 0; r < living; ++r) {
        total += theta[transitionOffset_ + static_cast<std::size_t>(s * living + r)];
      }
      for (int r = 0; r < living; ++r) {
        psi(r, s) = theta[transitionOffset_ + static_cast<std::size_t>(s * living + r)] / total;
      }
    }
  }

  const bool survivalVaries = structure_.survival == MultistateStructure::Survival::ByOccasion;
  const bool detectionVaries =
      structure_.detection == MultistateStructure::Detection::ByStateOccasion;

  HmmMatrices out;
  const int nT = survivalVaries ? numOccasions - 1 : 1;
  out.transitions.reserve(static_cast<std::size_t>(nT));
  for (int u = 1; u <= nT; ++u) {
    Matrix tm = Matrix::Zero(states, states);
    for (int s = 0; s < living; ++s) {
      const double phi = survival(theta, s, u);
      for (int r = 0; r < living; ++r) tm(r, s) = phi * psi(r, s);
      tm(dead, s) = 1.0 - phi;
    }
    tm(dead, dead) = 1.0;
    out.transitions.push_back(std::move(tm));
  }

  const int nZ = detectionVaries ? numOccasions : 1;
  const int notSeen = numObservable_;
  out.emissions.reserve(static_cast<std::size_t>(nZ));
  for (int u = 0; u < nZ; ++u) {
    Matrix z = Matrix::Zero(alphabetSize(), states);
    for (int s = 0; s < living; ++s) {
      const int obs = observableIndex_[static_cast<std::size_t>(s)];
      const double p = detection(theta, s, u);
      if (obs >= 0) z(obs, s) = p;
      z(notSeen, s) = 1.0 - p;
    }
    z(notSeen, dead) = 1.0;
    out.emissions.push_back(std::move(z));
  }
  return out;
}

CjsParams HierarchicalModel::cjsParams(std::span<const double> theta, int numOccasions) const {
  if (!supportsCjs()) {
    throw Error(ErrorKind::InvalidArgument, "model " + name() + " has no closed-form likelihood");
  }
  checkTheta(theta);
  CjsParams p;
  p.survival.resize(static_cast<std::size_t>(numOccasions - 1));
  p.detection.resize(static_cast<std::size_t>(numOccasions));
  for (int t = 0; t + 1 < numOccasions; ++t) {
    p.survival[static_cast<std::size_t>(t)] = survival(theta, 0, t + 1);
  }
  for (int t = 0; t < numOccasions; ++t) {
    p.detection[static_cast<std::size_t>(t)] = detection(theta, 0, t);
  }
  return p;
}

int HierarchicalModel::emissionRow(int symbol) const {
  if (symbol < 0 || symbol >= alphabetSize()) {
    throw Error(ErrorKind::DimensionMismatch, "symbol " + std::to_string(symbol) +
                                                  " outside alphabet of model " + name());
  }
  return symbol == 0 ? numObservable_ : symbol - 1;
}

int HierarchicalModel::stateForSymbol(int symbol) const {
  if (symbol < 1 || symbol >= alphabetSize()) {
    throw Error(ErrorKind::DimensionMismatch,
                "symbol " + std::to_string(symbol) + " does not identify a living state");
  }
  return stateOfSymbol_[static_cast<std::size_t>(symbol - 1)];
}

ObservationHistory HierarchicalModel::toEmissionRows(const ObservationHistory& raw) const {
  ObservationHistory rows = raw;
  for (int& c : rows.codes) c = emissionRow(c);
  return rows;
}

DiscreteHmmSpec HierarchicalModel::buildHmm(std::span<const double> theta,
                                            const ObservationHistory& rawHistory) const {
  const int k = rawHistory.length();
  HmmMatrices m = matrices(theta, k);
  Vector initial = Vector::Zero(numStates());
  initial(stateForSymbol(rawHistory.codes[static_cast<std::size_t>(rawHistory.firstOccasion)])) = 1.0;
  return DiscreteHmmSpec(std::move(initial), std::move(m.transitions), std::move(m.emissions), k,
                         /*conditionOnFirst=*/true);
}

Vector HierarchicalModel::entryDistribution() const {
  return Vector::Constant(numLivingStates(), 1.0 / numLivingStates());
}

void HierarchicalModel::checkDataset(int numOccasions, int alphabet) const {
  if (alphabet != alphabetSize()) {
    throw Error(ErrorKind::DimensionMismatch,
                "dataset alphabet " + std::to_string(alphabet) + " does not match model " + name() +
                    " (" + std::to_string(alphabetSize()) + ")");
  }
  if (numOccasions < 2) {
    throw Error(ErrorKind::DimensionMismatch, "datasets need at least two occasions");
  }
  if (structure_.numOccasions && *structure_.numOccasions != numOccasions) {
    throw Error(ErrorKind::DimensionMismatch,
                "model " + name() + " needs " + std::to_string(*structure_.numOccasions) +
                    " occasions, dataset has " + std::to_string(numOccasions));
  }
}

std::vector<double> HierarchicalModel::drawInitial(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> theta(params_.size());
  for (std::size_t j = 0; j < params_.size(); ++j) {
    theta[j] = params_[j].support == Support::UnitInterval ? unit(rng) : 1.0;
  }
  return theta;
}

// ---------------------------------------------------------------------------

FilteredLikelihood::FilteredLikelihood(const HierarchicalModel& model,
                                       const ReducedDataset& reduced)
    : model_(&model), raw_(reduced.uniqueHistories), numOccasions_(reduced.numOccasions) {
  model.checkDataset(reduced.numOccasions, reduced.alphabetSize);
  rows_.reserve(raw_.size());
  for (const auto& h : raw_) rows_.push_back(model.toEmissionRows(h));
  weights_.assign(reduced.multiplicities.begin(), reduced.multiplicities.end());
  entryState_.reserve(raw_.size());
  for (const auto& h : raw_) {
    entryState_.push_back(model.stateForSymbol(h.codes[static_cast<std::size_t>(h.firstOccasion)]));
  }
}

FilteredLikelihood::FilteredLikelihood(const HierarchicalModel& model,
                                       const CaptureDataset& dataset)
    : model_(&model), raw_(dataset.histories), numOccasions_(dataset.numOccasions) {
  model.checkDataset(dataset.numOccasions, dataset.alphabetSize);
  rows_.reserve(raw_.size());
  for (const auto& h : raw_) rows_.push_back(model.toEmissionRows(h));
  weights_.assign(raw_.size(), 1.0);
  entryState_.reserve(raw_.size());
  for (const auto& h : raw_) {
    entryState_.push_back(model.stateForSymbol(h.codes[static_cast<std::size_t>(h.firstOccasion)]));
  }
}

double FilteredLikelihood::operator()(std::span<const double> theta) const {
  if (!model_->inSupport(theta)) return kNegInf;
  double total = 0.0;
  if (model_->likelihoodMode() == LikelihoodMode::CjsClosedForm) {
    const CjsTable table(model_->cjsParams(theta, numOccasions_), numOccasions_);
    for (std::size_t j = 0; j < raw_.size(); ++j) {
      const double ll = table.logLik(raw_[j]);
      if (ll == kNegInf) return kNegInf;
      total += weights_[j] * ll;
    }
    return total;
  }

  const HmmMatrices m = model_->matrices(theta, numOccasions_);
  const auto S = static_cast<Eigen::Index>(model_->numStates());
  // small dense filter; rows_ were validated at construction
  Vector predicted(S), filtered(S);
  for (std::size_t j = 0; j < rows_.size(); ++j) {
    const auto& h = rows_[j];
    const int first = h.firstOccasion;
    filtered.setZero();
    filtered(entryState_[j]) = 1.0;
    double product = 1.0;
    double logAcc = 0.0;
    for (int t = first + 1; t < numOccasions_; ++t) {
      const Matrix& T = m.transitions.size() == 1 ? m.transitions[0]
                                                  : m.transitions[static_cast<std::size_t>(t - 1)];
      const Matrix& Z = m.emissions.size() == 1 ? m.emissions[0]
                                                : m.emissions[static_cast<std::size_t>(t)];
      const Eigen::Index row = h.codes[static_cast<std::size_t>(t)];
      double lik = 0.0;
      for (Eigen::Index r = 0; r < S; ++r) {
        double acc = 0.0;
        for (Eigen::Index c = 0; c < S; ++c) acc += T(r, c) * filtered(c);
        predicted(r) = Z(row, r) * acc;
        lik += predicted(r);
      }
      if (!(lik > 0.0)) return kNegInf;
      filtered = predicted / lik;
      product *= lik;
      if (product < 1e-280) {
        logAcc += std::log(product);
        product = 1.0;
      }
    }
    total += weights_[j] * (logAcc + std::log(product));
  }
  return total;
}

double logLikelihoodFiltered(const HierarchicalModel& model, std::span<const double> theta,
                             const ReducedDataset& reduced) {
  return FilteredLikelihood(model, reduced)(theta);
}

double logLikelihoodFull(const HierarchicalModel& model, std::span<const double> theta,
                         const CaptureDataset& dataset) {
  return FilteredLikelihood(model, dataset)(theta);
}

// ---------------------------------------------------------------------------

LatentStateMatrix::LatentStateMatrix(int numIndividuals, int numOccasions)
    : n_(numIndividuals),
      k_(numOccasions),
      states_(static_cast<std::size_t>(numIndividuals) * static_cast<std::size_t>(numOccasions), -1),
      sampled_(states_.size(), 0) {}

void LatentStateMatrix::set(int i, int t, int state) {
  const auto idx = index(i, t);
  if (!sampled_[idx]) {
    throw Error(ErrorKind::InconsistentLatentState,
                "latent (" + std::to_string(i) + "," + std::to_string(t) + ") is fixed");
  }
  states_[idx] = state;
}

std::size_t LatentStateMatrix::sampledCount() const {
  std::size_t count = 0;
  for (auto s : sampled_) count += s;
  return count;
}

LatentStateMatrix LatentStateMatrix::forDataset(const HierarchicalModel& model,
                                                const CaptureDataset& dataset) {
  model.checkDataset(dataset.numOccasions, dataset.alphabetSize);
  LatentStateMatrix latents(static_cast<int>(dataset.size()), dataset.numOccasions);
  for (int i = 0; i < latents.n_; ++i) {
    const auto& h = dataset.histories[static_cast<std::size_t>(i)];
    const int f = h.firstOccasion;
    latents.states_[latents.index(i, f)] =
        model.stateForSymbol(h.codes[static_cast<std::size_t>(f)]);
    for (int t = f + 1; t < latents.k_; ++t) {
      latents.states_[latents.index(i, t)] = 0;
      latents.sampled_[latents.index(i, t)] = 1;
    }
  }
  return latents;
}

LatentStateMatrix initializeLatents(const HierarchicalModel& model, std::span<const double> theta,
                                    const CaptureDataset& dataset) {
  LatentStateMatrix latents = LatentStateMatrix::forDataset(model, dataset);
  for (int i = 0; i < latents.numIndividuals(); ++i) {
    const auto& raw = dataset.histories[static_cast<std::size_t>(i)];
    const DiscreteHmmSpec hmm = model.buildHmm(theta, raw);
    const auto steps = forwardFilterDistributions(hmm, model.toEmissionRows(raw));
    if (steps.back().conditionalLikelihood <= 0.0) {
      throw Error(ErrorKind::InconsistentLatentState,
                  "history " + std::to_string(i) + " has zero probability at the initial theta");
    }
    const int f = raw.firstOccasion;
    const int k = dataset.numOccasions;
    if (k - 1 == f) continue;
    Eigen::Index best = 0;
    steps.back().filtered.maxCoeff(&best);
    int next = static_cast<int>(best);
    latents.set(i, k - 1, next);
    for (int t = k - 2; t > f; --t) {
      const Vector weights = steps[static_cast<std::size_t>(t - f)].filtered.cwiseProduct(
          hmm.transition(t + 1).row(next).transpose());
      weights.maxCoeff(&best);
      next = static_cast<int>(best);
      latents.set(i, t, next);
    }
  }
  return latents;
}

JointLikelihood::JointLikelihood(const HierarchicalModel& model, const CaptureDataset& dataset)
    : model_(&model), raw_(dataset.histories), numOccasions_(dataset.numOccasions) {
  model.checkDataset(dataset.numOccasions, dataset.alphabetSize);
  rows_.reserve(raw_.size());
  for (const auto& h : raw_) rows_.push_back(model.toEmissionRows(h));
}

double JointLikelihood::operator()(std::span<const double> theta,
                                   const LatentStateMatrix& latents) const {
  if (latents.numIndividuals() != static_cast<int>(raw_.size()) ||
      latents.numOccasions() != numOccasions_) {
    throw Error(ErrorKind::DimensionMismatch, "latent matrix does not match the dataset");
  }
  if (!model_->inSupport(theta)) return kNegInf;
  const HmmMatrices m = model_->matrices(theta, numOccasions_);
  std::vector<Matrix> logT;
  std::vector<Matrix> logZ;
  for (const auto& t : m.transitions) logT.push_back(t.array().log().matrix());
  for (const auto& z : m.emissions) logZ.push_back(z.array().log().matrix());
  const auto& lt = [&](int t) -> const Matrix& {
    return logT.size() == 1 ? logT.front() : logT[static_cast<std::size_t>(t - 1)];
  };
  const auto& lz = [&](int t) -> const Matrix& {
    return logZ.size() == 1 ? logZ.front() : logZ[static_cast<std::size_t>(t)];
  };

  double total = 0.0;
  for (std::size_t i = 0; i < raw_.size(); ++i) {
    const auto& raw = raw_[i];
    const auto& rows = rows_[i];
    const int f = raw.firstOccasion;
    const int ii = static_cast<int>(i);
    int prev = latents.at(ii, f);
    if (prev != model_->stateForSymbol(raw.codes[static_cast<std::size_t>(f)])) return kNegInf;
    for (int t = f + 1; t < numOccasions_; ++t) {
      const int x = latents.at(ii, t);
      total += lt(t)(x, prev) + lz(t)(rows.codes[static_cast<std::size_t>(t)], x);
      prev = x;
    }
    if (total == kNegInf) return kNegInf;
  }
  return total;
}

double logJoint(const HierarchicalModel& model, std::span<const double> theta,
                const LatentStateMatrix& latents, const CaptureDataset& dataset) {
  const double lp = model.logPrior(theta);
  if (lp == kNegInf) return kNegInf;
  return lp + JointLikelihood(model, dataset)(theta, latents);
}

}  // namespace hmmcr
