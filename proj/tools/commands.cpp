#include "commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "hmmcr/autoblock.hpp"
#include "hmmcr/chain_io.hpp"
#include "hmmcr/data.hpp"
#include "hmmcr/diagnostics.hpp"
#include "hmmcr/error.hpp"
#include "hmmcr/mcmc.hpp"
#include "hmmcr/model.hpp"
#include "hmmcr/random.hpp"
#include "hmmcr/simulate.hpp"

namespace fs = std::filesystem;

namespace hmmcr::cli {

namespace {

HierarchicalModel loadModel(const ModelChoice& choice) {
  if (choice.name == "custom") {
    if (choice.configPath.empty()) throw UsageError("--model custom needs --model-config");
    return readModelConfig(choice.configPath);
  }
  if (!choice.configPath.empty()) throw UsageError("--model-config only applies to --model custom");
  return modelByName(choice.name);
}

/// Files and directories created by one command, removed again unless the
/// command commits.
class OutputGuard {
 public:
  void createDirectory(const fs::path& dir) {
    if (fs::exists(dir)) {
      if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, "'" + dir.string() + "' is not a directory");
      return;
    }
    fs::create_directories(dir);
    dirs_.push_back(dir);
  }
  std::ofstream open(const fs::path& file) {
    if (file.has_parent_path()) createDirectory(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + file.string() + "'");
    files_.push_back(file);
    return out;
  }
  void commit() { committed_ = true; }
  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    for (auto it = files_.rbegin(); it != files_.rend(); ++it) fs::remove(*it, ec);
    for (auto it = dirs_.rbegin(); it != dirs_.rend(); ++it) fs::remove(*it, ec);
  }

 private:
  std::vector<fs::path> files_;
  std::vector<fs::path> dirs_;
  bool committed_ = false;
};

void finish(std::ofstream& out, const fs::path& file) {
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + file.string() + "'");
}

fs::path resolveOut(const std::string& out, const std::string& fallback) {
  if (!out.empty()) return fs::path(out);
  return fs::path(outputRoot()) / fallback;
}

}  // namespace

std::string outputRoot() {
  const char* env = std::getenv("HMMCR_OUTPUT_ROOT");
  return env && *env ? std::string(env) : std::string(".");
}

void cmdSimulate(const SimulateConfig& config) {
  const HierarchicalModel model = loadModel(config.model);
  int k = config.k.value_or(model.fixedOccasions().value_or(7));
  if (model.fixedOccasions() && k != *model.fixedOccasions()) {
    throw UsageError("model '" + model.name() + "' is defined for " +
                     std::to_string(*model.fixedOccasions()) + " occasions");
  }
  if (k < 2) throw UsageError("--k must be at least 2");
  std::vector<double> theta = config.theta;
  if (theta.empty()) {
    Rng rng(deriveSeed(config.seed, 100));
    theta = model.drawInitial(rng);
    std::cerr << "theta drawn from the prior:";
    for (double v : theta) std::cerr << ' ' << v;
    std::cerr << '\n';
  }
  if (theta.size() != model.dimension()) {
    throw UsageError("--theta needs " + std::to_string(model.dimension()) + " values for model '" +
                     model.name() + "'");
  }
  const SimulationResult sim = simulateDataset(model, theta, config.n, k, config.seed);

  OutputGuard guard;
  const fs::path file(config.out);
  auto out = guard.open(file);
  if (config.reduced) writeReducedDataset(out, reduce(sim.dataset));
  else writeDataset(out, sim.dataset);
  finish(out, file);
  guard.commit();
  if (sim.redraws > 0) {
    std::cerr << sim.redraws << " never-sighted individuals redrawn (" << sim.redrawPolicy << ")\n";
  }
}

namespace {

EfficiencyCost parseCost(const std::string& text) {
  if (text == "work") return EfficiencyCost::Work;
  if (text == "time") return EfficiencyCost::WallClock;
  throw UsageError("unknown cost '" + text + "' (work or time)");
}

}  // namespace

void cmdRun(const RunConfig& config) {
  const HierarchicalModel model = loadModel(config.model);
  const StrategyLabel label = parseStrategyLabel(config.strategy);
  const DataFile file = readDataFile(config.data, model.alphabetSize());
  if (label == StrategyLabel::LatentState && file.kind == DataFile::Kind::Reduced) {
    throw UsageError(
        "the latent strategy needs one history per individual; '" + config.data +
        "' holds reduced histories with counts (use filter or filter-rr, or expand the data)");
  }
  if (!config.scheme.empty() && label != StrategyLabel::FilteringBlocking) {
    throw UsageError("--scheme only applies to --strategy filter-block");
  }
  const CaptureDataset full =
      file.kind == DataFile::Kind::Full ? file.full : expand(file.reduced);

  ChainOutput chain;
  switch (label) {
    case StrategyLabel::LatentState: {
      SamplerScheme scheme = SamplerScheme::allUnivariate(model.dimension());
      scheme.latentSampling = true;
      chain = runMcmc(model, full, scheme, config.iterations, config.seed);
      break;
    }
    case StrategyLabel::Filtering:
      chain = runMcmc(model, full, SamplerScheme::allUnivariate(model.dimension()),
                      config.iterations, config.seed);
      break;
    case StrategyLabel::FilteringRR:
      chain = runMcmc(model, file.reduced, SamplerScheme::allUnivariate(model.dimension()),
                      config.iterations, config.seed);
      break;
    case StrategyLabel::FilteringBlocking: {
      SamplerScheme scheme;
      if (!config.scheme.empty()) {
        scheme = readScheme(config.scheme, model.dimension());
        if (scheme.latentSampling) throw UsageError("filter-block schemes cannot sample latent states");
      } else {
        AutoBlockSettings ab;
        ab.seed = deriveSeed(config.seed, 7);
        ab.discardFraction = config.discard;
        ab.cost = parseCost(config.cost);
        const AutoBlockResult r = autoBlock(model, file.reduced, ab);
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
        scheme = r.scheme;
        std::cerr << "autoblock selected " << scheme.describe(model.parameterNames()) << '\n';
      }
      chain = runMcmc(model, file.reduced, scheme, config.iterations, config.seed);
      break;
    }
  }
  const EfficiencyReport report = efficiencyReport(chain, config.discard, label);

  OutputGuard guard;
  const fs::path dir = resolveOut(config.out, std::string("run-") + config.strategy + "-seed" +
                                                  std::to_string(config.seed));
  guard.createDirectory(dir);
  {
    auto out = guard.open(dir / "chain.csv");
    writeChainCsv(out, chain);
    finish(out, dir / "chain.csv");
  }
  {
    auto out = guard.open(dir / "meta.json");
    writeChainMeta(out, chain,
                   {{"model", model.name()},
                    {"strategy", toString(label)},
                    {"data", config.data},
                    {"discard_fraction", std::to_string(config.discard)}});
    finish(out, dir / "meta.json");
  }
  {
    auto out = guard.open(dir / "report.csv");
    writeReportCsv(out, report);
    finish(out, dir / "report.csv");
  }
  guard.commit();
  std::cout << toString(label) << ": min ESPS " << report.minEsps << ", mean ESPS "
            << report.meanEsps << ", runtime " << report.runtimeSeconds << " s -> "
            << dir.string() << '\n';
}

void cmdAutoblock(const AutoblockConfig& config) {
  const HierarchicalModel model = loadModel(config.model);
  const DataFile file = readDataFile(config.data, model.alphabetSize());
  AutoBlockSettings settings;
  settings.pilotIterations = config.pilotIterations;
  settings.evalIterations = config.evalIterations;
  if (!config.heights.empty()) settings.heights = config.heights;
  settings.iterate = config.iterate;
  settings.seed = config.seed;
  settings.discardFraction = config.discard;
  settings.cost = parseCost(config.cost);
  const AutoBlockResult result = autoBlock(model, file.reduced, settings);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';

  const auto names = model.parameterNames();
  for (std::size_t i = 0; i < result.candidates.size(); ++i) {
    const auto& c = result.candidates[i];
    SamplerScheme s;
    s.blocks = c.partition;
    std::cerr << (i == result.selected ? "* " : "  ") << "h=" << c.sourceCutHeight
              << (settings.cost == EfficiencyCost::Work ? " min ESS/Mwork " : " min ESPS ")
              << c.measuredMinEsps << "  " << s.describe(names) << '\n';
  }

  OutputGuard guard;
  const fs::path path = resolveOut(config.out, "scheme-seed" + std::to_string(config.seed) + ".json");
  auto out = guard.open(path);
  writeScheme(out, result.scheme, names);
  finish(out, path);
  guard.commit();
  std::cout << path.string() << '\n';
}

void cmdReport(const ReportConfig& config) {
  std::vector<EfficiencyReport> reports;
  for (const auto& run : config.runs) {
    const fs::path dir(run);
    const std::string meta = (dir / "meta.json").string();
    const ChainOutput chain = readChain((dir / "chain.csv").string(), meta);
    const std::string strategy = readMetaField(meta, "strategy");
    if (strategy.empty()) throw Error(ErrorKind::Parse, "'" + meta + "' has no strategy field");
    reports.push_back(efficiencyReport(chain, config.discard, parseStrategyLabel(strategy)));
  }
  const ComparisonTable table = compareStrategies(reports);

  OutputGuard guard;
  const fs::path dir = resolveOut(config.out, "report");
  guard.createDirectory(dir);
  {
    auto out = guard.open(dir / "comparison.csv");
    writeComparisonCsv(out, table);
    finish(out, dir / "comparison.csv");
  }
  {
    auto out = guard.open(dir / "comparison.txt");
    writeComparisonText(out, table);
    finish(out, dir / "comparison.txt");
  }
  {
    auto out = guard.open(dir / "figure.csv");
    writeFigureData(out, table);
    finish(out, dir / "figure.csv");
  }
  guard.commit();
  writeComparisonText(std::cout, table);
}

}  // namespace hmmcr::cli
