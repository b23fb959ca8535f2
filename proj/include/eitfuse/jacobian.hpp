#pragma once

#include "eitfuse/forward.hpp"
#include "eitfuse/pixel_grid.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>

namespace eitfuse {

/// dV_m / d sigma_p for every schedule row m and pixel p, linearized at a
/// reference field.
struct SensitivityMatrix {
    Eigen::MatrixXd matrix;  // schedule.size() x grid.size()
    PairSchedule schedule;
    PixelGrid grid;
    std::uint64_t key = 0;  // hash of geometry, mesh density, grid and reference

    std::size_t rows() const { return static_cast<std::size_t>(matrix.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(matrix.cols()); }
};

/// Adjoint sensitivities. For the two-terminal scheme the measurement field
/// is the injection field, so the element entry is -A_e |grad u_m|^2 and
/// pixel entries aggregate those by overlap area.
///
/// A pixel perturbation delta raises element e by delta * overlap(e,p) / A_e.
SensitivityMatrix compute_jacobian(const Mesh& mesh, const ConductivityField& reference,
                                   const PairSchedule& schedule, const PixelGrid& grid,
                                   double current = 1.0);

/// Same as compute_jacobian, reusing a precomputed overlap.
SensitivityMatrix compute_jacobian(const Mesh& mesh, const ConductivityField& reference,
                                   const PairSchedule& schedule, const PixelOverlap& overlap,
                                   double current = 1.0);

/// Element field after raising pixel p by delta.
ConductivityField perturb_pixel(const Mesh& mesh, const ConductivityField& reference,
                                const PixelOverlap& overlap, std::size_t pixel, double delta);

/// Cache key for a sensitivity matrix.
std::uint64_t sensitivity_key(const Mesh& mesh, const ConductivityField& reference,
                              const PixelGrid& grid, double current);

/// Binary cache: magic, key, rows, cols, grid, row-major doubles.
void save_sensitivity(const SensitivityMatrix& s, const std::filesystem::path& path);
/// Returns nullopt if the file is missing or its key differs from expected_key.
std::optional<SensitivityMatrix> load_sensitivity(const std::filesystem::path& path,
                                                  std::uint64_t expected_key);

/// Loads from cache_dir when a matching file exists, otherwise computes and
/// stores it. An empty cache_dir disables caching.
SensitivityMatrix cached_jacobian(const Mesh& mesh, const ConductivityField& reference,
                                  const PairSchedule& schedule, const PixelGrid& grid,
                                  const std::filesystem::path& cache_dir, double current = 1.0);

} // namespace eitfuse
