#ifndef IGF_HARNESS_ACCEPTANCE_HPP
#define IGF_HARNESS_ACCEPTANCE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "igf/parallel.hpp"

namespace igf::harness {

enum class SuiteLevel { fast, full };

struct CriterionResult {
    int id = 0;
    std::string label;
    bool passed = false;
    std::string details;
    double seconds = 0.0;
};

/// Runs every acceptance criterion at the requested level.  `fast` caps
/// replicate counts at 10^3 and bridge draws at 10^3; every tolerance is
/// identical across levels.  The configs directory is needed only by the
/// determinism criterion.
std::vector<CriterionResult> run_acceptance(SuiteLevel level,
                                            const std::filesystem::path& configs_dir,
                                            Exec exec = Exec::openmp);

/// One line per criterion plus a trailing verdict line.
std::string format_report(const std::vector<CriterionResult>& results);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace igf::harness

#endif
