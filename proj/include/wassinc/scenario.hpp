#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wassinc/config.hpp"

namespace wassinc {

struct ManifestEntry {
  std::string file;
  std::string sha256;
};

struct RunOutcome {
  std::string experiment;
  bool pass = false;
  std::string status;
  std::vector<std::pair<std::string, double>> constants;
  std::vector<std::string> warnings;
  std::vector<ManifestEntry> files;  // manifest.json itself excluded
};

// Runs the configured experiment and writes into out_dir (created if needed):
//   trajectory.csv  t,particle,x1..xd (particle-major)
//   signal.csv      t_start,t_end,control_index (experiments with a control signal)
//   report.csv      t,measured,bound,margin
//   extra CSVs per experiment (refinement.csv, filippov.csv)
//   manifest.json   files with SHA-256 digests, constants, verdict
// Throws ConfigError for incomplete scenarios; I/O errors surface as std::runtime_error.
RunOutcome run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir);

std::string sha256_hex(std::string_view data);

}  // namespace wassinc
