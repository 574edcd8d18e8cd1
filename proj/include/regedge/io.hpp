#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "regedge/config.hpp"
#include "regedge/experiments.hpp"
#include "regedge/resampling.hpp"

namespace regedge {

/// Shortest representation that round-trips exactly.
std::string format_double(double v);

/// Writes `content` to `path` + ".partial" and renames it into place, so an
/// interrupted write never leaves a truncated final file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string diagnostics_csv(const std::vector<DiagnosticRecord>& records);
std::string edge_csv(const std::vector<EdgeSample>& samples);
std::string esd_csv(const EsdResult& r);
std::string averaging_csv(const AveragingReport& r);
std::string exchangeability_csv(const ExchangeabilityReport& r);

struct Check {
  std::string name;
  double value = 0.0;
  std::string band;
  bool pass = false;
};

struct RunOutcome {
  std::vector<Check> checks;
  std::filesystem::path csv;
  std::filesystem::path manifest;
  bool ok() const;
};

/// Runs the configured experiment, writes the CSV and its manifest and
/// evaluates the configured checks.
RunOutcome run_experiment(const ExperimentConfig& cfg);

/// run_experiment() plus a one-line summary per check on `log`; returns 0
/// when every check passes, 1 otherwise.
int run(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace regedge
