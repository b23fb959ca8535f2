#pragma once

#include "eitfuse/fuse.hpp"
#include "eitfuse/mesh.hpp"
#include "eitfuse/suites.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace eitfuse {

nlohmann::json mesh_to_json(const Mesh& mesh);

/// CSV with header "i,j,voltage", one row per schedule entry.
void write_frame_csv(const VoltageFrame& frame, const std::filesystem::path& path);
/// Rows may come in any order; they are placed by (i, j). Throws ConfigError
/// on malformed input, duplicate or missing pairs.
VoltageFrame read_frame_csv(const std::filesystem::path& path, int electrode_count);

/// Plain PGM (P2). Values are mapped linearly from [min, max] onto 0..255 and
/// the mapping is recorded in a "# scale <min> <max>" comment line.
void write_image_pgm(const ConductivityImage& image, const std::filesystem::path& path);
void write_mask_pgm(const BinaryMask& mask, const std::filesystem::path& path);
/// One CSV row per pixel row, top row first.
void write_image_csv(const ConductivityImage& image, const std::filesystem::path& path);

nlohmann::json scenario_to_json(const Scenario& scenario);
/// Inverse of scenario_to_json. Contacts given by "force" without
/// "delta_sigma" go through contact_from_force. Throws ConfigError.
Scenario scenario_from_json(const nlohmann::json& j, const SensorGeometry& geometry,
                            const PhantomConfig& phantoms);

/// Estimates, total force, stage diagnostics and the ROI report.
nlohmann::json pipeline_result_to_json(const PipelineResult& result);
/// Per ROI: id, pixel_count, intensity_sum, centroid_cm, bbox (pixel indices).
nlohmann::json roi_report_to_json(const std::vector<Roi>& rois);
nlohmann::json report_to_json(const MetricsReport& report);

/// Suite spec file: {"name", "cases": [{"name", "repetitions", "contacts": [...]}],
/// "noise": {...}}.
ExperimentSpec experiment_from_json(const nlohmann::json& j, const SensorGeometry& geometry,
                                    const PhantomConfig& phantoms);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);
/// Throws ConfigError if the file is missing or not valid JSON.
nlohmann::json read_json(const std::filesystem::path& path);

} // namespace eitfuse
