#include "hmmcr/target.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hmmcr/error.hpp"

namespace hmmcr {

FactoredDensity::FactoredDensity(std::size_t dimension, std::vector<std::string> names)
    : dimension_(dimension), names_(std::move(names)) {
  if (names_.empty()) {
    for (std::size_t j = 0; j < dimension_; ++j) names_.push_back("theta[" + std::to_string(j + 1) + "]");
  }
  if (names_.size() != dimension_) {
    throw Error(ErrorKind::DimensionMismatch, "parameter names do not match the dimension");
  }
}

void FactoredDensity::addTerm(std::vector<std::size_t> dependsOn, LogDensityFn logDensity,
                              std::string label, bool readsLatents, double cost) {
  for (std::size_t j : dependsOn) {
    if (j >= dimension_) {
      throw Error(ErrorKind::DimensionMismatch, "density term reads parameter " +
                                                    std::to_string(j) + " beyond the dimension");
    }
  }
  std::sort(dependsOn.begin(), dependsOn.end());
  dependsOn.erase(std::unique(dependsOn.begin(), dependsOn.end()), dependsOn.end());
  if (!(cost >= 0.0) || !std::isfinite(cost)) {
    throw Error(ErrorKind::InvalidArgument, "density term cost must be finite and non-negative");
  }
  terms_.push_back({std::move(dependsOn), std::move(logDensity), std::move(label), readsLatents, cost});
}

double FactoredDensity::operator()(std::span<const double> theta) const {
  double total = 0.0;
  for (const auto& term : terms_) {
    total += term.logDensity(theta);
    if (total == -std::numeric_limits<double>::infinity()) break;
  }
  return total;
}

std::vector<std::size_t> FactoredDensity::termsTouching(std::span<const std::size_t> block) const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < terms_.size(); ++a) {
    const auto& deps = terms_[a].dependsOn;
    const bool touches = std::any_of(block.begin(), block.end(), [&](std::size_t j) {
      return std::binary_search(deps.begin(), deps.end(), j);
    });
    if (touches) out.push_back(a);
  }
  return out;
}

FactoredDensity singleTermDensity(std::size_t dimension, LogDensityFn logDensity,
                                  std::vector<std::string> names) {
  FactoredDensity density(dimension, std::move(names));
  std::vector<std::size_t> all(dimension);
  std::iota(all.begin(), all.end(), std::size_t{0});
  density.addTerm(std::move(all), std::move(logDensity), "log density");
  return density;
}

}  // namespace hmmcr
