#pragma once

#include <iosfwd>

#include "minklab/config.hpp"

namespace minklab {

/// Executes one experiment described by a validated config: runs the study,
/// writes CSV/JSON outputs plus the manifest under config.out_dir. Returns
/// process exit code semantics: 0 success, 2 validation error, 3 numerical
/// failure. Failures also emit a machine-readable JSON error object to `err`.
int run_experiment(const ExperimentConfig& config, std::ostream& log, std::ostream& err);

/// Convenience: parse + validate + run a config file.
int run_config_file(const std::string& path, std::ostream& log, std::ostream& err);

}  // namespace minklab
