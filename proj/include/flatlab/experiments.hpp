#pragma once

#include "flatlab/config.hpp"

#include <string>
#include <vector>

namespace flatlab {

struct ReportFile {
    std::string name;
    std::string content;
};

struct ExperimentResult {
    bool pass = false;
    std::string summary;
    std::vector<ReportFile> files;  ///< report.json plus CSV tables
};

/// Runs one experiment in memory. Throws ConfigError when the config does
/// not validate.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace flatlab
