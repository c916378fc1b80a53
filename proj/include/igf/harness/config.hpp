#ifndef IGF_HARNESS_CONFIG_HPP
#define IGF_HARNESS_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace igf::harness {

/// Parsed and schema-checked experiment description.  The canonical dump
/// (sorted keys, no whitespace) is what gets hashed, so semantically equal
/// files share a hash.
struct ExperimentConfig {
    std::string experiment;
    nlohmann::json model;
    nlohmann::json numerics;
    std::uint64_t seed = 0;
    std::string output_directory;
    std::string canonical;
    std::uint64_t config_hash = 0;
};

/// All schema and basic-invariant problems in the text, including model
/// construction failures; empty means valid.  Never throws on bad content.
std::vector<std::string> validate_config_text(const std::string& text);

/// Parse + validate; throws ConfigError listing every problem.
ExperimentConfig parse_config_text(const std::string& text);

ExperimentConfig load_config(const std::filesystem::path& path);

std::uint64_t fnv1a_hash(const std::string& text);

Eigen::VectorXd json_to_vector(const nlohmann::json& j);
Eigen::MatrixXd json_to_matrix(const nlohmann::json& j);

bool known_drift_name(const std::string& name);
bool known_obs_name(const std::string& name);

}  // namespace igf::harness

#endif
