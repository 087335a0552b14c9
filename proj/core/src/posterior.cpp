#include <algorithm>
#include <limits>
#include <memory>
#include <numeric>

#include "hmmcr/error.hpp"
#include "hmmcr/mcmc.hpp"

namespace hmmcr {

namespace {

void addPriorTerms(FactoredDensity& density, const std::shared_ptr<const HierarchicalModel>& model) {
  for (std::size_t j = 0; j < model->dimension(); ++j) {
    const Prior prior = model->params()[j].prior;
    density.addTerm({j}, [prior, j](std::span<const double> theta) {
      return prior.logDensity(theta[j]);
    }, "prior " + model->params()[j].name);
  }
}

std::vector<std::size_t> allIndices(std::size_t n) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return all;
}

template <typename Data>
SamplingProblem makeFiltered(const HierarchicalModel& model, const Data& data,
                             std::vector<double> initial) {
  auto owned = std::make_shared<const HierarchicalModel>(model);
  auto likelihood = std::make_shared<const FilteredLikelihood>(*owned, data);
  SamplingProblem problem{FactoredDensity(owned->dimension(), owned->parameterNames()),
                          std::move(initial), {}, 0};
  addPriorTerms(problem.density, owned);
  // one forward pass per stored history, roughly k * S^2 each
  const double states = owned->numStates();
  const double cost = static_cast<double>(likelihood->numTerms()) * data.numOccasions * states * states;
  problem.density.addTerm(
      allIndices(owned->dimension()),
      [owned, likelihood](std::span<const double> theta) { return (*likelihood)(theta); },
      "filtered likelihood", false, std::max(cost, 1.0));
  return problem;
}

struct LatentChainState {
  std::shared_ptr<const HierarchicalModel> model;
  CaptureDataset dataset;
  std::unique_ptr<JointLikelihood> joint;
  LatentStateMatrix latents;
};

}  // namespace

SamplingProblem filteredProblem(const HierarchicalModel& model, const ReducedDataset& reduced,
                                std::vector<double> initial) {
  return makeFiltered(model, reduced, std::move(initial));
}

SamplingProblem filteredProblem(const HierarchicalModel& model, const CaptureDataset& dataset,
                                std::vector<double> initial) {
  return makeFiltered(model, dataset, std::move(initial));
}

SamplingProblem latentProblem(const HierarchicalModel& model, const CaptureDataset& dataset,
                              std::vector<double> initial) {
  auto chain = std::make_shared<LatentChainState>();
  chain->model = std::make_shared<const HierarchicalModel>(model);
  chain->dataset = dataset;
  chain->joint = std::make_unique<JointLikelihood>(*chain->model, chain->dataset);
  chain->latents = initializeLatents(*chain->model, initial, chain->dataset);

  SamplingProblem problem{FactoredDensity(model.dimension(), model.parameterNames()),
                          std::move(initial), {}, chain->latents.sampledCount()};
  addPriorTerms(problem.density, chain->model);
  problem.density.addTerm(
      allIndices(model.dimension()),
      [chain](std::span<const double> theta) { return (*chain->joint)(theta, chain->latents); },
      "complete-data likelihood", /*readsLatents=*/true,
      std::max(1.0, static_cast<double>(dataset.size()) * dataset.numOccasions));

  problem.latentSweep = [chain](std::span<const double> theta, Rng& rng) {
    const int k = chain->dataset.numOccasions;
    const HmmMatrices m = chain->model->matrices(theta, k);
    const auto& rows = chain->joint->rows();
    for (int i = 0; i < chain->latents.numIndividuals(); ++i) {
      const auto& h = rows[static_cast<std::size_t>(i)];
      for (int t = h.firstOccasion + 1; t < k; ++t) {
        latentGibbsStep(m, chain->latents, h, i, t, rng);
      }
    }
  };
  return problem;
}

std::vector<double> initialTheta(const HierarchicalModel& model, std::uint64_t seed) {
  Rng rng(deriveSeed(seed, 0));
  return model.drawInitial(rng);
}

ChainOutput runMcmc(const HierarchicalModel& model, const CaptureDataset& dataset,
                    const SamplerScheme& scheme, std::size_t iterations, std::uint64_t seed) {
  std::vector<double> initial = initialTheta(model, seed);
  const SamplingProblem problem = scheme.latentSampling
                                      ? latentProblem(model, dataset, std::move(initial))
                                      : filteredProblem(model, dataset, std::move(initial));
  McmcSettings settings;
  settings.iterations = iterations;
  settings.seed = deriveSeed(seed, 1);
  ChainOutput out = runMcmc(problem, scheme, settings);
  out.seed = seed;
  return out;
}

ChainOutput runMcmc(const HierarchicalModel& model, const ReducedDataset& reduced,
                    const SamplerScheme& scheme, std::size_t iterations, std::uint64_t seed) {
  if (scheme.latentSampling) {
    throw Error(ErrorKind::ReducedDataUnsupported,
                "latent-state sampling needs the full dataset: every individual history must "
                "have its own latent state sequence, so a reduced representation cannot be used");
  }
  McmcSettings settings;
  settings.iterations = iterations;
  settings.seed = deriveSeed(seed, 1);
  ChainOutput out =
      runMcmc(filteredProblem(model, reduced, initialTheta(model, seed)), scheme, settings);
  out.seed = seed;
  return out;
}

}  // namespace hmmcr
