#pragma once

#include "voxfract/evolution/evolution.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace voxfract
{

inline constexpr int kConfigSchemaVersion = 1;

/// Invalid configuration; what() is "source:line:column: message" when the
/// offending node is known.
struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig
{
    EvolutionConfig evolution;
    int trials = 1; // trial k runs with seed + k

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses a YAML document. Every key is optional except schema_version;
/// unknown keys are errors.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical YAML with every field spelled out; parse_config inverts it exactly.
std::string config_to_yaml(const ExperimentConfig& cfg);

} // namespace voxfract
