#pragma once

#include "d2d/sim.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace d2d::cli {

inline constexpr const char* kToolName = "d2dsim";
inline constexpr const char* kToolVersion = "1.0.0";

/// Builds a config from JSON. Missing keys keep their defaults, unknown keys
/// and out-of-range values raise ConfigError naming the dotted key path.
sim::ExperimentConfig config_from_json(const nlohmann::json& j);

/// Fully materialized config; config_from_json(config_to_json(c)) == c.
nlohmann::json config_to_json(const sim::ExperimentConfig& cfg);

/// Reads a config file. A run manifest is accepted as well, in which case its
/// embedded config is used.
sim::ExperimentConfig parse_config(const std::filesystem::path& path);

struct NamedRun {
    std::string label;
    sim::ExperimentConfig config;
};

std::vector<std::string> preset_names();

/// Expands a named experiment preset into its runs. Throws ConfigError for an
/// unknown name; the message lists the available presets.
std::vector<NamedRun> preset(std::string_view name);

} // namespace d2d::cli
