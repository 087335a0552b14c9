#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmmcr/mcmc.hpp"

namespace hmmcr {

inline constexpr double kDefaultDiscardFraction = 0.1;
inline constexpr std::size_t kMinEssLength = 100;

struct EssEstimate {
  double ess = 0.0;
  /// Set for constant chains, whose ESS is reported as 0.
  bool degenerate = false;
};

/// Effective sample size by Geyer's initial monotone positive sequence:
/// autocorrelations are summed in adjacent pairs until a pair sum is not
/// positive, and pair sums are forced non-increasing. Clamped to the chain
/// length. Throws on chains shorter than kMinEssLength or non-finite values.
EssEstimate effectiveSampleSize(std::span<const double> chain);

enum class StrategyLabel { LatentState, Filtering, FilteringRR, FilteringBlocking };

const char* toString(StrategyLabel label);
/// Accepts the display names and the CLI names (latent, filter, filter-rr,
/// filter-block).
StrategyLabel parseStrategyLabel(const std::string& text);

struct EfficiencyReport {
  StrategyLabel strategy = StrategyLabel::Filtering;
  std::vector<std::string> names;
  std::vector<double> perParamEss;
  std::vector<bool> degenerate;
  double runtimeSeconds = 0.0;
  std::vector<double> perParamEsps;
  double minEsps = 0.0;
  double meanEsps = 0.0;
  double maxEsps = 0.0;
  std::size_t samplesUsed = 0;
};

/// Per-parameter ESS over the rows after the first `discardFraction` of the
/// chain, divided by the sampling runtime.
EfficiencyReport efficiencyReport(const ChainOutput& chain, double discardFraction,
                                  StrategyLabel strategy);

/// ESPS figures computed from precomputed ESS values.
EfficiencyReport efficiencyFromEss(std::vector<std::string> names, std::vector<double> ess,
                                   double runtimeSeconds, StrategyLabel strategy);

struct ComparisonRow {
  StrategyLabel strategy = StrategyLabel::Filtering;
  double minEsps = 0.0;
  double meanEsps = 0.0;
  double runtimeSeconds = 0.0;
  /// minEsps relative to the LatentState row, when one exists.
  std::optional<double> foldChange;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
};

/// Needs at least two reports over the same parameter names.
ComparisonTable compareStrategies(std::span<const EfficiencyReport> reports);

void writeComparisonCsv(std::ostream& out, const ComparisonTable& table);
void writeComparisonText(std::ostream& out, const ComparisonTable& table);
/// strategy,min,mean rows for external plotting.
void writeFigureData(std::ostream& out, const ComparisonTable& table);

/// Per-parameter report CSV: parameter,ess,esps plus summary lines.
void writeReportCsv(std::ostream& out, const EfficiencyReport& report);

/// Posterior mean, standard deviation and Monte Carlo standard error
/// (sd / sqrt(ESS)) of one column after discarding a burn-in fraction.
struct PosteriorSummary {
  double mean = 0.0;
  double sd = 0.0;
  double ess = 0.0;
  double mcse = 0.0;
};
PosteriorSummary summarize(std::span<const double> chain);
std::vector<PosteriorSummary> summarize(const ChainOutput& chain, double discardFraction);

}  // namespace hmmcr
