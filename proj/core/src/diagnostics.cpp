#include "hmmcr/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "hmmcr/error.hpp"

namespace hmmcr {

EssEstimate effectiveSampleSize(std::span<const double> chain) {
  const std::size_t n = chain.size();
  if (n < kMinEssLength) {
    throw Error(ErrorKind::ChainTooShort, "ESS needs at least " + std::to_string(kMinEssLength) +
                                              " draws, got " + std::to_string(n));
  }
  double mean = 0.0;
  bool constant = true;
  for (double v : chain) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "chain has non-finite values");
    mean += v;
    constant = constant && v == chain[0];
  }
  if (constant) return {0.0, true};
  mean /= static_cast<double>(n);
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = chain[i] - mean;

  const auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += centered[i] * centered[i + lag];
    return s / static_cast<double>(n);
  };
  const double gamma0 = autocov(0);
  if (!(gamma0 > 0.0)) return {0.0, true};

  double tau = -1.0;
  double prevPair = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    const double lagEven = (m == 0) ? gamma0 : autocov(2 * m);
    const double pair = (lagEven + autocov(2 * m + 1)) / gamma0;
    if (!(pair > 0.0)) break;
    prevPair = std::min(prevPair, pair);
    tau += 2.0 * prevPair;
  }
  const double ess = static_cast<double>(n) / std::max(tau, 1e-12);
  return {std::min(ess, static_cast<double>(n)), false};
}

const char* toString(StrategyLabel label) {
  switch (label) {
    case StrategyLabel::LatentState: return "LatentState";
    case StrategyLabel::Filtering: return "Filtering";
    case StrategyLabel::FilteringRR: return "FilteringRR";
    case StrategyLabel::FilteringBlocking: return "FilteringBlocking";
  }
  return "unknown";
}

StrategyLabel parseStrategyLabel(const std::string& text) {
  if (text == "LatentState" || text == "latent") return StrategyLabel::LatentState;
  if (text == "Filtering" || text == "filter") return StrategyLabel::Filtering;
  if (text == "FilteringRR" || text == "filter-rr") return StrategyLabel::FilteringRR;
  if (text == "FilteringBlocking" || text == "filter-block") return StrategyLabel::FilteringBlocking;
  throw Error(ErrorKind::InvalidArgument, "unknown strategy '" + text + "'");
}

EfficiencyReport efficiencyFromEss(std::vector<std::string> names, std::vector<double> ess,
                                   double runtimeSeconds, StrategyLabel strategy) {
  if (!(runtimeSeconds > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "runtime must be positive");
  }
  if (ess.empty() || names.size() != ess.size()) {
    throw Error(ErrorKind::DimensionMismatch, "report needs one ESS value per parameter");
  }
  EfficiencyReport r;
  r.strategy = strategy;
  r.names = std::move(names);
  r.perParamEss = std::move(ess);
  r.degenerate.assign(r.perParamEss.size(), false);
  r.runtimeSeconds = runtimeSeconds;
  double sum = 0.0;
  r.minEsps = std::numeric_limits<double>::infinity();
  r.maxEsps = 0.0;
  for (double e : r.perParamEss) {
    const double esps = e / runtimeSeconds;
    r.perParamEsps.push_back(esps);
    sum += esps;
    r.minEsps = std::min(r.minEsps, esps);
    r.maxEsps = std::max(r.maxEsps, esps);
  }
  r.meanEsps = sum / static_cast<double>(r.perParamEsps.size());
  // Guard the ordering against rounding in the mean.
  r.meanEsps = std::clamp(r.meanEsps, r.minEsps, r.maxEsps);
  return r;
}

EfficiencyReport efficiencyReport(const ChainOutput& chain, double discardFraction,
                                  StrategyLabel strategy) {
  if (!(discardFraction >= 0.0 && discardFraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "discard fraction must be in [0, 1)");
  }
  const auto rows = static_cast<std::size_t>(chain.samples.rows());
  const auto skip = static_cast<std::size_t>(std::floor(discardFraction * static_cast<double>(rows)));
  const std::size_t kept = rows - skip;
  std::vector<double> ess;
  std::vector<bool> degenerate;
  std::vector<double> column(kept);
  for (Eigen::Index j = 0; j < chain.samples.cols(); ++j) {
    for (std::size_t i = 0; i < kept; ++i) {
      column[i] = chain.samples(static_cast<Eigen::Index>(skip + i), j);
    }
    const EssEstimate e = effectiveSampleSize(column);
    ess.push_back(e.ess);
    degenerate.push_back(e.degenerate);
  }
  EfficiencyReport r = efficiencyFromEss(chain.names, std::move(ess), chain.runtimeSeconds, strategy);
  r.degenerate = std::move(degenerate);
  r.samplesUsed = kept;
  return r;
}

ComparisonTable compareStrategies(std::span<const EfficiencyReport> reports) {
  if (reports.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "strategy comparison needs at least two reports");
  }
  for (const auto& r : reports) {
    if (r.names != reports.front().names) {
      throw Error(ErrorKind::DimensionMismatch,
                  "reports cover different parameter sets; compare runs of the same model");
    }
  }
  std::optional<double> latentMin;
  for (const auto& r : reports) {
    if (r.strategy == StrategyLabel::LatentState) {
      latentMin = r.minEsps;
      break;
    }
  }
  ComparisonTable table;
  for (const auto& r : reports) {
    ComparisonRow row{r.strategy, r.minEsps, r.meanEsps, r.runtimeSeconds, std::nullopt};
    if (latentMin && *latentMin > 0.0) row.foldChange = r.minEsps / *latentMin;
    table.rows.push_back(row);
  }
  return table;
}

namespace {

std::string number(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

}  // namespace

void writeComparisonCsv(std::ostream& out, const ComparisonTable& table) {
  out << "strategy,min_esps,mean_esps,runtime_seconds,fold_change\n";
  for (const auto& row : table.rows) {
    out << toString(row.strategy) << ',' << number(row.minEsps) << ',' << number(row.meanEsps)
        << ',' << number(row.runtimeSeconds) << ','
        << (row.foldChange ? number(*row.foldChange) : "") << '\n';
  }
}

void writeComparisonText(std::ostream& out, const ComparisonTable& table) {
  out << std::left << std::setw(20) << "strategy" << std::right << std::setw(14) << "min ESPS"
      << std::setw(14) << "mean ESPS" << std::setw(14) << "runtime (s)" << std::setw(14)
      << "fold change" << '\n';
  for (const auto& row : table.rows) {
    out << std::left << std::setw(20) << toString(row.strategy) << std::right << std::setw(14)
        << number(row.minEsps) << std::setw(14) << number(row.meanEsps) << std::setw(14)
        << number(row.runtimeSeconds) << std::setw(14)
        << (row.foldChange ? number(*row.foldChange) : "-") << '\n';
  }
}

void writeFigureData(std::ostream& out, const ComparisonTable& table) {
  out << "strategy,min,mean\n";
  for (const auto& row : table.rows) {
    out << toString(row.strategy) << ',' << number(row.minEsps) << ',' << number(row.meanEsps)
        << '\n';
  }
}

void writeReportCsv(std::ostream& out, const EfficiencyReport& report) {
  out << "parameter,ess,esps\n";
  for (std::size_t j = 0; j < report.names.size(); ++j) {
    const std::string& name = report.names[j];
    if (name.find(',') != std::string::npos) out << '"' << name << '"';
    else out << name;
    out << ',' << number(report.perParamEss[j]) << ','
        << number(report.perParamEsps[j]) << '\n';
  }
  out << "# strategy," << toString(report.strategy) << '\n';
  out << "# runtime_seconds," << number(report.runtimeSeconds) << '\n';
  out << "# min_esps," << number(report.minEsps) << '\n';
  out << "# mean_esps," << number(report.meanEsps) << '\n';
}

PosteriorSummary summarize(std::span<const double> chain) {
  PosteriorSummary s;
  const auto n = static_cast<double>(chain.size());
  for (double v : chain) s.mean += v;
  s.mean /= n;
  double ss = 0.0;
  for (double v : chain) ss += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(ss / (n - 1.0));
  const EssEstimate e = effectiveSampleSize(chain);
  s.ess = e.ess;
  s.mcse = e.ess > 0.0 ? s.sd / std::sqrt(e.ess) : 0.0;
  return s;
}

std::vector<PosteriorSummary> summarize(const ChainOutput& chain, double discardFraction) {
  const auto rows = static_cast<std::size_t>(chain.samples.rows());
  const auto skip = static_cast<std::size_t>(std::floor(discardFraction * static_cast<double>(rows)));
  std::vector<PosteriorSummary> out;
  std::vector<double> column(rows - skip);
  for (Eigen::Index j = 0; j < chain.samples.cols(); ++j) {
    for (std::size_t i = 0; i < column.size(); ++i) {
      column[i] = chain.samples(static_cast<Eigen::Index>(skip + i), j);
    }
    out.push_back(summarize(column));
  }
  return out;
}

}  // namespace hmmcr
