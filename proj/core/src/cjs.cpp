#include "hmmcr/cjs.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hmmcr/error.hpp"

namespace hmmcr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safeLog(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

void validate(const CjsParams& params, int k) {
  if (static_cast<int>(params.survival.size()) < k - 1 ||
      static_cast<int>(params.detection.size()) < k) {
    throw Error(ErrorKind::DimensionMismatch,
                "CJS parameters cover fewer occasions than the history");
  }
  for (double v : params.survival) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "survival probability outside [0,1]");
    }
  }
  for (double v : params.detection) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "detection probability outside [0,1]");
    }
  }
}

int lastSighting(const ObservationHistory& history) {
  for (int t = history.length() - 1; t >= history.firstOccasion; --t) {
    if (history.codes[static_cast<std::size_t>(t)] == 1) return t;
  }
  return -1;
}

}  // namespace

CjsParams CjsParams::constant(double survival, double detection, int numOccasions) {
  CjsParams p;
  p.survival.assign(static_cast<std::size_t>(std::max(numOccasions - 1, 0)), survival);
  p.detection.assign(static_cast<std::size_t>(numOccasions), detection);
  return p;
}

double cjsLogLik(const CjsParams& params, const ObservationHistory& history) {
  const int k = history.length();
  validate(params, k);
  const int first = history.firstOccasion;
  if (first < 0 || first >= k) {
    throw Error(ErrorKind::DimensionMismatch, "firstOccasion outside history");
  }
  for (int t = first; t < k; ++t) {
    const int c = history.codes[static_cast<std::size_t>(t)];
    if (c != 0 && c != 1) {
      throw Error(ErrorKind::InvalidArgument,
                  "CJS histories use binary codes, got " + std::to_string(c));
    }
  }
  const int last = lastSighting(history);
  if (last < 0) throw Error(ErrorKind::NoSighting, "CJS history has no sighting");

  double chi = 1.0;
  for (int t = k - 2; t >= last; --t) {
    const double phi = params.survival[static_cast<std::size_t>(t)];
    chi = 1.0 - phi + phi * (1.0 - params.detection[static_cast<std::size_t>(t + 1)]) * chi;
  }

  double ll = 0.0;
  for (int t = first; t < last; ++t) ll += safeLog(params.survival[static_cast<std::size_t>(t)]);
  for (int t = first + 1; t <= last; ++t) {
    const double p = params.detection[static_cast<std::size_t>(t)];
    ll += history.codes[static_cast<std::size_t>(t)] == 1 ? safeLog(p) : safeLog(1.0 - p);
  }
  return ll + safeLog(chi);
}

CjsTable::CjsTable(const CjsParams& params, int numOccasions) {
  validate(params, numOccasions);
  const auto k = static_cast<std::size_t>(numOccasions);
  logSurvival_.resize(k > 0 ? k - 1 : 0);
  logDetected_.resize(k);
  logMissed_.resize(k);
  logChi_.resize(k);
  for (std::size_t t = 0; t + 1 < k; ++t) logSurvival_[t] = safeLog(params.survival[t]);
  for (std::size_t t = 0; t < k; ++t) {
    logDetected_[t] = safeLog(params.detection[t]);
    logMissed_[t] = safeLog(1.0 - params.detection[t]);
  }
  double chi = 1.0;
  logChi_[k - 1] = 0.0;
  for (std::size_t t = k - 1; t-- > 0;) {
    const double phi = params.survival[t];
    chi = 1.0 - phi + phi * (1.0 - params.detection[t + 1]) * chi;
    logChi_[t] = safeLog(chi);
  }
}

double CjsTable::logLik(const ObservationHistory& history) const {
  const int first = history.firstOccasion;
  const int last = lastSighting(history);
  if (last < 0) throw Error(ErrorKind::NoSighting, "CJS history has no sighting");
  double ll = logChi_[static_cast<std::size_t>(last)];
  for (int t = first; t < last; ++t) {
    const auto u = static_cast<std::size_t>(t);
    ll += logSurvival_[u];
    ll += history.codes[u + 1] == 1 ? logDetected_[u + 1] : logMissed_[u + 1];
  }
  return ll;
}

DiscreteHmmSpec cjsAsHmm(const CjsParams& params, int numOccasions) {
  validate(params, numOccasions);
  std::vector<Matrix> transitions;
  for (int t = 1; t < numOccasions; ++t) {
    const double phi = params.survival[static_cast<std::size_t>(t - 1)];
    Matrix tm(2, 2);
    tm << phi, 0.0,
          1.0 - phi, 1.0;
    transitions.push_back(std::move(tm));
  }
  if (transitions.empty()) transitions.push_back(Matrix::Identity(2, 2));
  std::vector<Matrix> emissions;
  for (int t = 0; t < numOccasions; ++t) {
    const double p = params.detection[static_cast<std::size_t>(t)];
    Matrix z(2, 2);
    z << p, 0.0,
         1.0 - p, 1.0;
    emissions.push_back(std::move(z));
  }
  Vector initial(2);
  initial << 1.0, 0.0;
  return DiscreteHmmSpec(std::move(initial), std::move(transitions), std::move(emissions),
                         numOccasions, /*conditionOnFirst=*/true);
}

ObservationHistory cjsToHmmCodes(const ObservationHistory& history) {
  ObservationHistory out = history;
  for (int& c : out.codes) c = (c == 1) ? 0 : 1;
  return out;
}

}  // namespace hmmcr
