#pragma once

#include "eitfuse/forward.hpp"
#include "eitfuse/jacobian.hpp"
#include "eitfuse/phantoms.hpp"
#include "eitfuse/reconstruct.hpp"
#include "eitfuse/segment.hpp"

#include <memory>
#include <span>
#include <vector>

namespace eitfuse {

/// F_i = F_total * S_i / S_total. Throws AllocationError when no S_i is
/// positive and ConfigError on negative inputs.
std::vector<double> allocate_forces(std::span<const double> sums, double total_force);

struct FusionConfig {
    // Estimates below this force (N) are dropped and the total re-allocated
    // over the survivors. Zero disables pruning.
    double force_floor = 0.05;

    void validate() const;
};

struct PipelineConfig {
    PixelGrid grid;
    ReconstructionConfig reconstruction;
    SegmentationConfig segmentation;
    AirPressureModel air;
    FusionConfig fusion;

    void validate() const;
};

struct ContactEstimate {
    Point position;  // cm
    double force = 0.0;  // N
    double intensity_share = 0.0;
    int roi_id = 0;
    std::size_t pixel_count = 0;
    double intensity_sum = 0.0;
};

struct PipelineDiagnostics {
    double threshold = 0.0;      // Otsu t* on the normalized image
    std::size_t raw_roi_count = 0;  // components before size/force pruning
    std::size_t roi_count = 0;      // ROIs that received force
    bool degenerate = false;        // nothing to segment
};

struct PipelineResult {
    std::vector<ContactEstimate> estimates;  // descending force
    double total_force = 0.0;                // from the pressure channel
    PipelineDiagnostics diagnostics;
    ConductivityImage image;  // preprocessed reconstruction
    BinaryMask mask;          // refined ROI mask
    std::vector<Roi> rois;    // ROIs that received force, by id
};

/// Holds the reconstruction operator so repeated runs reuse one factorization.
/// Safe for concurrent run() calls.
class Pipeline {
public:
    /// Throws ConfigError if the sensitivity grid differs from config.grid.
    Pipeline(PipelineConfig config, SensitivityMatrix jacobian);

    const PipelineConfig& config() const { return config_; }
    const TikhonovReconstructor& reconstructor() const { return reconstructor_; }

    /// dv -> Tikhonov -> preprocess -> normalize -> Otsu -> binarize ->
    /// refine -> label -> intensity sums -> pressure -> allocation.
    PipelineResult run(const VoltageFrame& baseline, const VoltageFrame& contact,
                       double delta_p) const;

private:
    PipelineConfig config_;
    TikhonovReconstructor reconstructor_;
    StructuringElement disk_;
};

PipelineResult run_pipeline(const VoltageFrame& baseline, const VoltageFrame& contact,
                            double delta_p, const Pipeline& pipeline);

} // namespace eitfuse
