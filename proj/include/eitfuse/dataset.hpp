#pragma once

#include "eitfuse/forward.hpp"
#include "eitfuse/phantoms.hpp"
#include "eitfuse/pixel_grid.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace eitfuse {

struct DatasetConfig {
    // counts[k] samples with k + 1 contacts.
    std::array<int, 5> counts{50, 50, 50, 50, 50};
    std::uint64_t seed = 1;
    PhantomConfig phantoms;
    AirPressureModel air;
    bool noisy_pressure = true;
    unsigned threads = 0;

    /// Throws ConfigError for a zero or negative category count.
    void validate() const;
    std::size_t total() const;
};

struct DatasetSample {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    Scenario scenario;
    VoltageFrame contact;
    ConductivityImage truth;
    double pressure = 0.0;
};

/// Every sample shares the homogeneous baseline frame.
struct Dataset {
    VoltageFrame baseline;
    std::vector<DatasetSample> samples;
};

/// Sample i draws from its own stream derive_seed(seed, i), so the output does
/// not depend on the thread count. Sampling and solver failures are rethrown
/// with the sample index in the message.
Dataset generate_dataset(const DatasetConfig& config, const Mesh& mesh, const PixelGrid& grid);

/// manifest.json, baseline.csv, and per sample a frame CSV, a truth PGM and a
/// truth CSV under samples/.
void write_dataset(const Dataset& dataset, const DatasetConfig& config, const Mesh& mesh,
                   const std::filesystem::path& dir);

} // namespace eitfuse
