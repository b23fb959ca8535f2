#pragma once

#include "eitfuse/dataset.hpp"
#include "eitfuse/fuse.hpp"
#include "eitfuse/mesh.hpp"
#include "eitfuse/phantoms.hpp"
#include "eitfuse/suites.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace eitfuse {

/// Every tunable of the toolkit in one place. See README for the JSON schema.
struct AppConfig {
    SensorGeometry geometry;
    int nodes_per_side = kDefaultNodesPerSide;
    double current = 1.0;
    PipelineConfig pipeline;
    PhantomConfig phantoms;
    NoiseSettings noise;
    std::string cache_dir;  // empty disables the Jacobian cache
    unsigned threads = 0;   // 0 = hardware concurrency

    void validate() const;
};

/// Starts from the defaults and overrides what the JSON names. Unknown keys
/// and wrongly typed values raise ConfigError.
AppConfig config_from_json(const nlohmann::json& j);
AppConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const AppConfig& config);

/// {"voltage_fraction", "baseline_noise", "pressure_noise"}; `path` prefixes
/// error messages.
NoiseSettings noise_from_json(const nlohmann::json& j, const std::string& path = "noise");
nlohmann::json noise_to_json(const NoiseSettings& noise);

} // namespace eitfuse
