#pragma once

#include <string>
#include <vector>

#include "baryfold/model_io.hpp"

namespace baryfold {

/// Configuration of one verification run.  Zero-valued numeric fields take
/// per-command defaults.  Every randomized sweep is driven by the seed, so
/// equal configs give byte-identical outputs.
struct RunConfig {
  std::string command;
  nlohmann::json model;  // descriptor; defaults to hyperbolic(3)
  std::uint64_t seed = 1;
  int samples = 0;
  int resolution = 0;
  double tol = 0.0;
  std::string out_dir;  // empty: no files written

  // command-specific knobs
  int k = 0;              // trace index (0: floor(n/4)+1)
  double horizon = 0.0;   // jacobi horizon (0: default)
  double s = 0.0;         // natural-map parameter (0: default)
  double s_min = 0.0, s_max = 0.0;
  int s_count = 0;
  double window_r0 = 0.0, window_r1 = 0.0;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::uint64_t hash() const;
};

struct CheckRecord {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Report {
  std::string command;
  nlohmann::json config_echo;
  std::string config_hash;
  std::vector<CheckRecord> checks;
  nlohmann::json summary;
  int failures = 0;
  double wall_seconds = 0.0;  // console only; kept out of the JSON so
                              // reports stay byte-stable across runs

  nlohmann::json to_json() const;
  int exit_code() const { return failures == 0 ? 0 : 1; }
};

const std::vector<std::string>& known_commands();

/// Dispatches a validated config to the module operations.  Unknown
/// commands or malformed models throw std::invalid_argument (the CLI maps
/// those to exit code 2); check failures are recorded in the report.
Report run(const RunConfig& config);

/// Write via a temp file in the target directory plus rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace baryfold
