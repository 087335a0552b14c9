#include "hmmcr/autoblock.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "hmmcr/diagnostics.hpp"
#include "hmmcr/error.hpp"

namespace hmmcr {

CorrelationEstimate estimateCorrelationFull(const ChainOutput& pilot, double discardFraction) {
  if (!(discardFraction >= 0.0 && discardFraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "discard fraction must be in [0, 1)");
  }
  const auto n = pilot.samples.rows();
  const auto skip = static_cast<Eigen::Index>(std::floor(discardFraction * static_cast<double>(n)));
  const Eigen::Index rows = n - skip;
  if (rows < static_cast<Eigen::Index>(kMinPilotRows)) {
    throw Error(ErrorKind::ChainTooShort, "pilot chain has " + std::to_string(rows) +
                                              " rows after discard; need at least " +
                                              std::to_string(kMinPilotRows));
  }
  const Matrix x = pilot.samples.bottomRows(rows);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Matrix centered = x.rowwise() - mean;
  CorrelationEstimate out;
  out.covariance = (centered.transpose() * centered) / static_cast<double>(rows - 1);
  const auto d = x.cols();
  out.correlation = Matrix::Identity(d, d);
  std::vector<bool> constant(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    constant[static_cast<std::size_t>(j)] = (x.col(j).array() == x(0, j)).all();
    if (constant[static_cast<std::size_t>(j)]) out.constantColumns.push_back(static_cast<std::size_t>(j));
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      double r = 0.0;
      if (!constant[static_cast<std::size_t>(i)] && !constant[static_cast<std::size_t>(j)]) {
        r = out.covariance(i, j) / std::sqrt(out.covariance(i, i) * out.covariance(j, j));
        r = std::clamp(r, -1.0, 1.0);
      }
      out.correlation(i, j) = out.correlation(j, i) = r;
    }
  }
  return out;
}

Matrix estimateCorrelation(const ChainOutput& pilot, double discardFraction) {
  auto est = estimateCorrelationFull(pilot, discardFraction);
  for (std::size_t j : est.constantColumns) {
    std::cerr << "warning: parameter " << (j < pilot.names.size() ? pilot.names[j] : std::to_string(j))
              << " is constant in the pilot; correlations set to 0\n";
  }
  return est.correlation;
}

double minEfficiency(const ChainOutput& chain, double discardFraction, EfficiencyCost cost) {
  const auto report = efficiencyReport(chain, discardFraction, StrategyLabel::FilteringBlocking);
  if (cost == EfficiencyCost::WallClock) return report.minEsps;
  if (!(chain.work > 0.0)) throw Error(ErrorKind::InvalidArgument, "chain recorded no work");
  return *std::min_element(report.perParamEss.begin(), report.perParamEss.end()) / chain.work * 1e6;
}

namespace {

bool better(const BlockingCandidate& a, const BlockingCandidate& b) {
  if (a.measuredMinEsps != b.measuredMinEsps) return a.measuredMinEsps > b.measuredMinEsps;
  auto multi = [](const BlockingCandidate& c) {
    return std::count_if(c.partition.begin(), c.partition.end(),
                         [](const auto& blk) { return blk.size() > 1; });
  };
  return multi(a) < multi(b);
}

struct Round {
  std::vector<BlockingCandidate> candidates;
  std::size_t selected = 0;
  double univariateMinEsps = 0.0;
};

Round evaluateRound(const SamplingProblem& problem, const ChainOutput& pilot,
                    const AutoBlockSettings& settings, std::vector<std::string>& warnings) {
  const CorrelationEstimate est = estimateCorrelationFull(pilot, settings.discardFraction);
  for (std::size_t j : est.constantColumns) {
    warnings.push_back("parameter " + (j < pilot.names.size() ? pilot.names[j] : std::to_string(j)) +
                       " is constant in the pilot; correlations set to 0");
  }
  std::vector<double> heights = settings.heights;
  if (std::find(heights.begin(), heights.end(), 0.0) == heights.end()) heights.insert(heights.begin(), 0.0);
  std::vector<BlockingCandidate> all = candidatePartitions(est.correlation, heights);

  std::vector<BlockingCandidate> distinct;
  for (auto& c : all) {
    const bool seen = std::any_of(distinct.begin(), distinct.end(),
                                  [&](const BlockingCandidate& d) { return d.partition == c.partition; });
    if (!seen) distinct.push_back(std::move(c));
  }

  SamplingProblem evalProblem = problem;
  evalProblem.initial = pilot.finalState;
  McmcSettings mcmc;
  mcmc.iterations = settings.evalIterations;
  mcmc.seed = deriveSeed(settings.seed, 2);
  mcmc.proposalCovariance = est.covariance;

  Round round;
  bool haveUnivariate = false;
  for (auto& c : distinct) {
    SamplerScheme scheme;
    scheme.blocks = c.partition;
    scheme.latentSampling = false;
    try {
      const ChainOutput chain = runMcmc(evalProblem, scheme, mcmc);
      c.measuredMinEsps = minEfficiency(chain, settings.discardFraction, settings.cost);
    } catch (const Error& e) {
      warnings.push_back("candidate at cut height " + std::to_string(c.sourceCutHeight) +
                         " skipped: " + e.what());
      c.measuredMinEsps = -1.0;
      continue;
    }
    if (c.partition.size() == problem.density.dimension()) {
      haveUnivariate = true;
      round.univariateMinEsps = c.measuredMinEsps;
    }
  }
  std::erase_if(distinct, [](const BlockingCandidate& c) { return c.measuredMinEsps < 0.0; });
  if (distinct.empty()) {
    throw Error(ErrorKind::InvalidArgument, "every blocking candidate failed to run");
  }
  if (!haveUnivariate) warnings.push_back("the all-univariate candidate failed to run");
  std::size_t best = 0;
  for (std::size_t i = 1; i < distinct.size(); ++i) {
    if (better(distinct[i], distinct[best])) best = i;
  }
  round.candidates = std::move(distinct);
  round.selected = best;
  return round;
}

}  // namespace

AutoBlockResult autoBlock(const SamplingProblem& problem, const AutoBlockSettings& settings) {
  if (problem.latentSweep) {
    throw Error(ErrorKind::InvalidArgument, "automated blocking needs a filtered-likelihood posterior");
  }
  const std::size_t dim = problem.density.dimension();
  AutoBlockResult result;

  McmcSettings pilotSettings;
  pilotSettings.iterations = settings.pilotIterations;
  pilotSettings.seed = deriveSeed(settings.seed, 1);
  SamplerScheme pilotScheme = SamplerScheme::allUnivariate(dim);
  ChainOutput pilot = runMcmc(problem, pilotScheme, pilotSettings);

  const std::size_t rounds = settings.iterate ? std::max<std::size_t>(settings.maxRounds, 1) : 1;
  SamplerScheme chosen = pilotScheme;
  for (std::size_t r = 0; r < rounds; ++r) {
    Round round = evaluateRound(problem, pilot, settings, result.warnings);
    result.rounds = r + 1;
    SamplerScheme next;
    next.blocks = round.candidates[round.selected].partition;
    result.candidates = std::move(round.candidates);
    result.selected = round.selected;
    result.univariateMinEsps = round.univariateMinEsps;
    const bool unchanged = next.canonical().blocks == chosen.canonical().blocks;
    chosen = next;
    if (unchanged || r + 1 == rounds) break;
    // re-pilot under the new scheme from where the previous pilot stopped
    SamplingProblem again = problem;
    again.initial = pilot.finalState;
    pilotSettings.seed = deriveSeed(settings.seed, 10 + r);
    pilot = runMcmc(again, chosen, pilotSettings);
  }
  result.scheme = chosen.canonical();
  return result;
}

AutoBlockResult autoBlock(const HierarchicalModel& model, const ReducedDataset& data,
                          const AutoBlockSettings& settings) {
  return autoBlock(filteredProblem(model, data, initialTheta(model, settings.seed)), settings);
}

AutoBlockResult autoBlock(const HierarchicalModel& model, const CaptureDataset& data,
                          const AutoBlockSettings& settings) {
  return autoBlock(filteredProblem(model, data, initialTheta(model, settings.seed)), settings);
}

}  // namespace hmmcr
