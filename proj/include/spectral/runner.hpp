#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "spectral/config.hpp"

namespace spectral {

// Record of one experiment run. config is the fully resolved config echo;
// artifacts lists the files written to the output directory (the manifest
// itself excluded; it carries the wall clock and is not byte-reproducible).
struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::vector<std::string> artifacts;
  double wall_clock_seconds = 0.0;
  std::uint64_t seed = 0;
  std::string version;
  bool pass = false;
};

// Executes the experiment, writes its artifacts plus manifest.json under
// out_dir (created if missing), and returns the manifest. pass reflects
// every asserted bound of the command.
RunManifest run(const ExperimentConfig& config, const std::string& out_dir);

// Re-executes the config embedded in a manifest. Artifacts are
// byte-identical to the original run's.
RunManifest rerun_from_manifest(const std::string& manifest_path,
                                const std::string& out_dir);

nlohmann::json manifest_to_json(const RunManifest& m);

}  // namespace spectral
