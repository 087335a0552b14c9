#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hmmcr {

using LogDensityFn = std::function<double(std::span<const double>)>;

/// One additive piece of a log posterior, e.g. a prior factor or a data
/// likelihood, with the parameters it reads.
struct DensityTerm {
  std::vector<std::size_t> dependsOn;
  LogDensityFn logDensity;
  std::string label;
  /// Also reads latent state, so it must be refreshed after latent updates.
  bool readsLatents = false;
  /// Relative price of one evaluation, for counted-work efficiency.
  double cost = 1.0;
};

/// A log posterior written as a sum of terms. Samplers only re-evaluate the
/// terms that read the parameters they move.
class FactoredDensity {
 public:
  explicit FactoredDensity(std::size_t dimension, std::vector<std::string> names = {});

  void addTerm(std::vector<std::size_t> dependsOn, LogDensityFn logDensity,
               std::string label = {}, bool readsLatents = false, double cost = 1.0);

  std::size_t dimension() const { return dimension_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<DensityTerm>& terms() const { return terms_; }

  /// Sum of all terms.
  double operator()(std::span<const double> theta) const;

  /// Indices of terms reading any parameter in `block`, ascending.
  std::vector<std::size_t> termsTouching(std::span<const std::size_t> block) const;

 private:
  std::size_t dimension_;
  std::vector<std::string> names_;
  std::vector<DensityTerm> terms_;
};

/// A single-term density over all parameters.
FactoredDensity singleTermDensity(std::size_t dimension, LogDensityFn logDensity,
                                  std::vector<std::string> names = {});

}  // namespace hmmcr
