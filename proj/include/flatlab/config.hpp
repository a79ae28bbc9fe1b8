#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace flatlab {

struct ExperimentConfig {
    std::string experiment = "catenoid-fit";
    int n = 3;
    double alpha = 0.5;
    double beta = 0.5;
    double eta = 1e-3;
    double R = 4096.0;
    /// Second mode amplitude of the mesoscale mixture.
    double sigma = 2.0;
    int radial = 129;
    int angular = 32;
    std::uint64_t seed = 1;
    std::string out;
};

const std::vector<std::string>& experiment_kinds();

/// Flat `key = value` text; `#` starts a comment. Unknown keys and values
/// that do not parse raise ParseError with the 1-based line. Range checks
/// are left to validate().
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});

/// One `key=value` assignment, as given on the command line.
void apply_override(ExperimentConfig& config, std::string_view assignment);

/// Every violated constraint, one message each; empty when valid.
std::vector<std::string> validate(const ExperimentConfig& config);

/// Resolved config in the same format parse_config reads.
std::string to_text(const ExperimentConfig& config);

}  // namespace flatlab
