#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "hmmcr/error.hpp"

namespace {

void addModelOptions(CLI::App* cmd, hmmcr::cli::ModelChoice& model) {
  cmd->add_option("--model", model.name, "dipper, orchid, goose or custom")
      ->check(CLI::IsMember({"dipper", "orchid", "goose", "custom"}));
  cmd->add_option("--model-config", model.configPath, "JSON model description for --model custom")
      ->check(CLI::ExistingFile);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace hmmcr::cli;
  CLI::App app{"Hierarchical capture-recapture models fitted by MCMC"};
  app.require_subcommand(1);

  SimulateConfig sim;
  auto* simCmd = app.add_subcommand("simulate", "Simulate a capture-history data file");
  addModelOptions(simCmd, sim.model);
  simCmd->add_option("--n", sim.n, "Number of individuals")->check(CLI::PositiveNumber);
  simCmd->add_option("--k", sim.k, "Number of occasions");
  simCmd->add_option("--theta", sim.theta, "Parameter values, comma separated")->delimiter(',');
  simCmd->add_option("--seed", sim.seed, "Random seed");
  simCmd->add_option("--out", sim.out, "Output data file")->required();
  simCmd->add_flag("--reduced", sim.reduced, "Write unique histories with counts");

  RunConfig run;
  auto* runCmd = app.add_subcommand("run", "Run one MCMC chain and report its efficiency");
  addModelOptions(runCmd, run.model);
  runCmd->add_option("--data", run.data, "Data file")->required()->check(CLI::ExistingFile);
  runCmd->add_option("--strategy", run.strategy, "latent, filter, filter-rr or filter-block")
      ->check(CLI::IsMember({"latent", "filter", "filter-rr", "filter-block"}));
  runCmd->add_option("--cost", run.cost, "Inline autoblock ranking: counted work or time")
      ->check(CLI::IsMember({"work", "time"}));
  runCmd->add_option("--scheme", run.scheme, "Blocking scheme file for filter-block")
      ->check(CLI::ExistingFile);
  runCmd->add_option("--iterations", run.iterations, "MCMC iterations")->check(CLI::PositiveNumber);
  runCmd->add_option("--seed", run.seed, "Random seed");
  runCmd->add_option("--out", run.out, "Output directory");
  runCmd->add_option("--discard", run.discard, "Burn-in fraction")->check(CLI::Range(0.0, 0.99));

  AutoblockConfig ab;
  auto* abCmd = app.add_subcommand("autoblock", "Choose a blocking scheme from a pilot run");
  addModelOptions(abCmd, ab.model);
  abCmd->add_option("--data", ab.data, "Data file")->required()->check(CLI::ExistingFile);
  abCmd->add_option("--pilot-iterations", ab.pilotIterations)->check(CLI::PositiveNumber);
  abCmd->add_option("--eval-iterations", ab.evalIterations)->check(CLI::PositiveNumber);
  abCmd->add_option("--heights", ab.heights, "Cut heights, comma separated")->delimiter(',');
  abCmd->add_flag("--iterate", ab.iterate, "Re-pilot until the selection settles");
  abCmd->add_option("--cost", ab.cost, "Rank candidates by ESS per unit of counted work or per second")
      ->check(CLI::IsMember({"work", "time"}));
  abCmd->add_option("--seed", ab.seed, "Random seed");
  abCmd->add_option("--out", ab.out, "Scheme file to write");
  abCmd->add_option("--discard", ab.discard, "Burn-in fraction")->check(CLI::Range(0.0, 0.99));

  ReportConfig rep;
  auto* repCmd = app.add_subcommand("report", "Compare strategies across run directories");
  repCmd->add_option("--runs", rep.runs, "Run directories")->required()->expected(2, -1);
  repCmd->add_option("--out", rep.out, "Output directory");
  repCmd->add_option("--discard", rep.discard, "Burn-in fraction")->check(CLI::Range(0.0, 0.99));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simCmd) cmdSimulate(sim);
    else if (*runCmd) cmdRun(run);
    else if (*abCmd) cmdAutoblock(ab);
    else if (*repCmd) cmdReport(rep);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const hmmcr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
