#include "hmmcr/mcmc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>
#include <variant>

#include "hmmcr/error.hpp"

namespace hmmcr {

namespace {

constexpr double kDefaultProposalSd = 0.1;

struct BlockRuntime {
  std::variant<UnivariateSampler, BlockSampler> sampler;
  std::vector<std::size_t> affected;
  std::vector<std::size_t> unaffected;
};

}  // namespace

SamplerScheme SamplerScheme::allUnivariate(std::size_t dimension) {
  SamplerScheme s;
  for (std::size_t j = 0; j < dimension; ++j) s.blocks.push_back({j});
  return s;
}

SamplerScheme SamplerScheme::singleBlock(std::size_t dimension) {
  SamplerScheme s;
  std::vector<std::size_t> all(dimension);
  std::iota(all.begin(), all.end(), std::size_t{0});
  s.blocks.push_back(std::move(all));
  return s;
}

void SamplerScheme::validate(std::size_t dimension) const {
  std::vector<int> seen(dimension, 0);
  for (const auto& block : blocks) {
    if (block.empty()) throw Error(ErrorKind::InvalidArgument, "sampler scheme has an empty block");
    for (std::size_t j : block) {
      if (j >= dimension) {
        throw Error(ErrorKind::InvalidArgument,
                    "sampler scheme references parameter " + std::to_string(j) +
                        " but the model has " + std::to_string(dimension));
      }
      if (seen[j]++) {
        throw Error(ErrorKind::InvalidArgument,
                    "parameter " + std::to_string(j) + " appears in more than one block");
      }
    }
  }
  for (std::size_t j = 0; j < dimension; ++j) {
    if (!seen[j]) {
      throw Error(ErrorKind::InvalidArgument,
                  "parameter " + std::to_string(j) + " is not assigned to a sampler");
    }
  }
  if (adaptation.interval < 1) {
    throw Error(ErrorKind::InvalidArgument, "adaptation interval must be positive");
  }
}

std::size_t SamplerScheme::multiParameterBlocks() const {
  return static_cast<std::size_t>(
      std::count_if(blocks.begin(), blocks.end(), [](const auto& b) { return b.size() > 1; }));
}

SamplerScheme SamplerScheme::canonical() const {
  SamplerScheme out = *this;
  for (auto& b : out.blocks) std::sort(b.begin(), b.end());
  std::sort(out.blocks.begin(), out.blocks.end());
  return out;
}

std::string SamplerScheme::describe(const std::vector<std::string>& names) const {
  std::ostringstream out;
  const SamplerScheme c = canonical();
  for (std::size_t b = 0; b < c.blocks.size(); ++b) {
    if (b) out << ' ';
    out << '{';
    for (std::size_t m = 0; m < c.blocks[b].size(); ++m) {
      if (m) out << ", ";
      const std::size_t j = c.blocks[b][m];
      out << (j < names.size() ? names[j] : std::to_string(j));
    }
    out << '}';
  }
  return out.str();
}

ChainOutput runMcmc(const SamplingProblem& problem, const SamplerScheme& scheme,
                    const McmcSettings& settings) {
  const FactoredDensity& density = problem.density;
  const std::size_t dim = density.dimension();
  scheme.validate(dim);
  if (problem.initial.size() != dim) {
    throw Error(ErrorKind::DimensionMismatch, "initial state has the wrong dimension");
  }
  if (static_cast<bool>(problem.latentSweep) != scheme.latentSampling) {
    throw Error(ErrorKind::InvalidArgument,
                scheme.latentSampling
                    ? "scheme requests latent sampling but the problem has no latent states"
                    : "problem samples latent states; the scheme must enable latent sampling");
  }
  if (settings.proposalCovariance &&
      (settings.proposalCovariance->rows() != static_cast<Eigen::Index>(dim) ||
       settings.proposalCovariance->cols() != static_cast<Eigen::Index>(dim))) {
    throw Error(ErrorKind::DimensionMismatch, "proposal covariance has the wrong dimension");
  }

  std::vector<double> state = problem.initial;
  const auto& terms = density.terms();
  std::vector<double> termValues(terms.size());
  std::string bad;
  for (std::size_t a = 0; a < terms.size(); ++a) {
    termValues[a] = terms[a].logDensity(state);
    if (!std::isfinite(termValues[a])) {
      bad += (bad.empty() ? "" : ", ") +
             (terms[a].label.empty() ? "term " + std::to_string(a) : terms[a].label) + " = " +
             std::to_string(termValues[a]);
    }
  }
  if (!bad.empty()) {
    throw Error(ErrorKind::NonFinitePosterior, "initial log posterior is not finite: " + bad);
  }

  std::vector<BlockRuntime> blocks;
  blocks.reserve(scheme.blocks.size());
  for (const auto& block : scheme.blocks) {
    BlockRuntime rt{UnivariateSampler(0, 0.0), {}, {}};
    if (block.size() == 1) {
      double scale = kDefaultProposalSd;
      if (settings.proposalCovariance) {
        const double var = (*settings.proposalCovariance)(static_cast<Eigen::Index>(block[0]),
                                                          static_cast<Eigen::Index>(block[0]));
        if (var > 0.0 && std::isfinite(var)) scale = 2.38 * std::sqrt(var);
      }
      rt.sampler = UnivariateSampler(block[0], scale);
    } else {
      const auto d = static_cast<Eigen::Index>(block.size());
      Matrix cov = Matrix::Identity(d, d) *
                   (kDefaultProposalSd * kDefaultProposalSd * static_cast<double>(d) / (2.38 * 2.38));
      if (settings.proposalCovariance) {
        Matrix sub(d, d);
        for (Eigen::Index r = 0; r < d; ++r) {
          for (Eigen::Index c = 0; c < d; ++c) {
            sub(r, c) = (*settings.proposalCovariance)(static_cast<Eigen::Index>(block[static_cast<std::size_t>(r)]),
                                                       static_cast<Eigen::Index>(block[static_cast<std::size_t>(c)]));
          }
        }
        try {
          (void)BlockProposal(sub);
          cov = sub;
        } catch (const Error&) {
          cov = BlockProposal::diagonal(sub).covariance();
        }
      }
      rt.sampler = BlockSampler(block, std::move(cov));
    }
    rt.affected = density.termsTouching(block);
    for (std::size_t a = 0; a < terms.size(); ++a) {
      if (!std::binary_search(rt.affected.begin(), rt.affected.end(), a)) rt.unaffected.push_back(a);
    }
    blocks.push_back(std::move(rt));
  }

  std::vector<std::size_t> latentTerms;
  for (std::size_t a = 0; a < terms.size(); ++a) {
    if (terms[a].readsLatents) latentTerms.push_back(a);
  }

  std::vector<double> scratch(terms.size());
  double work = 0.0;
  ChainOutput out;
  out.names = density.names();
  out.samples.resize(static_cast<Eigen::Index>(settings.iterations), static_cast<Eigen::Index>(dim));
  out.seed = settings.seed;
  out.scheme = scheme;
  out.latentCount = problem.latentCount;

  Rng rng(settings.seed);
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t it = 0; it < settings.iterations; ++it) {
    for (auto& rt : blocks) {
      double other = 0.0;
      for (std::size_t a : rt.unaffected) other += termValues[a];
      double current = other;
      for (std::size_t a : rt.affected) current += termValues[a];
      struct PartialEval {
        double other;
        const std::vector<std::size_t>* affected;
        const std::vector<DensityTerm>* terms;
        std::vector<double>* scratch;
        double* work;
      } ctx{other, &rt.affected, &terms, &scratch, &work};
      // Captures one pointer so std::function stays allocation-free.
      const LogDensityFn partial = [c = &ctx](std::span<const double> theta) {
        double total = c->other;
        for (std::size_t a : *c->affected) {
          (*c->scratch)[a] = (*c->terms)[a].logDensity(theta);
          *c->work += (*c->terms)[a].cost;
          total += (*c->scratch)[a];
          if (total == -std::numeric_limits<double>::infinity()) break;
        }
        return total;
      };
      const StepOutcome outcome =
          std::visit([&](auto& s) { return s.step(state, current, partial, rng); }, rt.sampler);
      if (outcome.accepted) {
        for (std::size_t a : rt.affected) termValues[a] = scratch[a];
      }
    }
    if (problem.latentSweep) {
      problem.latentSweep(state, rng);
      for (std::size_t a : latentTerms) {
        termValues[a] = terms[a].logDensity(state);
        work += terms[a].cost;
        if (!std::isfinite(termValues[a])) {
          throw Error(ErrorKind::InconsistentLatentState,
                      "log posterior became non-finite after the latent sweep");
        }
      }
    }
    for (std::size_t j = 0; j < dim; ++j) {
      out.samples(static_cast<Eigen::Index>(it), static_cast<Eigen::Index>(j)) = state[j];
    }
    for (auto& rt : blocks) {
      if (auto* u = std::get_if<UnivariateSampler>(&rt.sampler)) {
        u->afterIteration(scheme.adaptation);
      } else {
        std::get<BlockSampler>(rt.sampler).afterIteration(state, scheme.adaptation);
      }
    }
  }
  const auto stop = std::chrono::steady_clock::now();
  out.runtimeSeconds =
      std::max(std::chrono::duration<double>(stop - start).count(), 1e-9);

  for (const auto& rt : blocks) {
    out.acceptanceRates.push_back(
        std::visit([](const auto& s) { return s.acceptanceRate(); }, rt.sampler));
  }
  out.finalState = state;
  out.work = work;
  return out;
}

}  // namespace hmmcr
