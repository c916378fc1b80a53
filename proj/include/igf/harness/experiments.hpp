#ifndef IGF_HARNESS_EXPERIMENTS_HPP
#define IGF_HARNESS_EXPERIMENTS_HPP

#include <filesystem>
#include <map>
#include <string>

#include "igf/harness/config.hpp"
#include "igf/harness/csv.hpp"
#include "igf/parallel.hpp"

namespace igf::harness {

/// Runs the named experiment and returns its tables keyed by file name
/// (always including summary.csv).  Deterministic for a fixed (config, seed).
std::map<std::string, ResultTable> run_experiment(const ExperimentConfig& cfg,
                                                  Exec exec = Exec::openmp);

/// Runs the experiment and writes every table under the output directory
/// (the config's, unless overridden).  Returns the written paths.
std::vector<std::filesystem::path> run_and_write(const ExperimentConfig& cfg,
                                                 const std::string& output_override = {},
                                                 Exec exec = Exec::openmp);

/// Metadata header shared by every table of a run.
Metadata base_metadata(const ExperimentConfig& cfg);

}  // namespace igf::harness

#endif
