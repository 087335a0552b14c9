#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmmcr::cli {

/// Bad flags or flag combinations; exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelChoice {
  std::string name = "dipper";
  std::string configPath;
};

struct SimulateConfig {
  ModelChoice model;
  int n = 300;
  std::optional<int> k;
  std::vector<double> theta;
  std::uint64_t seed = 1;
  std::string out;
  bool reduced = false;
};

struct RunConfig {
  ModelChoice model;
  std::string data;
  std::string strategy = "filter";
  std::string scheme;
  /// Candidate efficiency measure for inline autoblock: "work" or "time".
  std::string cost = "work";
  std::size_t iterations = 10'000;
  std::uint64_t seed = 1;
  std::string out;
  double discard = 0.1;
};

struct AutoblockConfig {
  ModelChoice model;
  std::string data;
  std::size_t pilotIterations = 10'000;
  std::size_t evalIterations = 5'000;
  std::vector<double> heights;
  bool iterate = false;
  std::string cost = "work";
  std::uint64_t seed = 1;
  std::string out;
  double discard = 0.1;
};

struct ReportConfig {
  std::vector<std::string> runs;
  std::string out;
  double discard = 0.1;
};

void cmdSimulate(const SimulateConfig& config);
void cmdRun(const RunConfig& config);
void cmdAutoblock(const AutoblockConfig& config);
void cmdReport(const ReportConfig& config);

/// Default location for outputs: $HMMCR_OUTPUT_ROOT, else the working directory.
std::string outputRoot();

}  // namespace hmmcr::cli
