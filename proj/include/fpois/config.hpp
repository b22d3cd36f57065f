#ifndef FPOIS_CONFIG_HPP
#define FPOIS_CONFIG_HPP

#include <iosfwd>
#include <string>

#include "fpois/experiments.hpp"

namespace fpois {

// One run = one flat key/value text file. Unknown keys are rejected; all
// physical parameters are validated through the rates module before any
// compute starts.
struct RunConfig {
  StudyConfig study;
  int n_single = 0;              // grid resolution for sample/solve runs
  std::uint64_t stream_id = 0;   // noise stream for sample/solve runs
  double isometry_max_dev = 4.0; // acceptance threshold on standardized deviations
  std::string out_dir = "runs";
  bool seed_overridden = false;  // FPOIS_SEED was set in the environment
};

// Throws std::invalid_argument with "<name>:<line>: ..." context.
RunConfig parse_config(std::istream& in, const std::string& name);
RunConfig parse_config_file(const std::string& path);

// The documented key set, one per line (printed by the CLI usage text).
std::string config_key_help();

}  // namespace fpois

#endif
