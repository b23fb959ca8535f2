#include "eitfuse/fuse.hpp"

#include "eitfuse/errors.hpp"

#include <algorithm>
#include <cmath>

namespace eitfuse {

std::vector<double> allocate_forces(std::span<const double> sums, double total_force) {
    if (!(total_force >= 0.0) || !std::isfinite(total_force)) {
        throw ConfigError("total force must be finite and non-negative");
    }
    double s_total = 0.0;
    for (double s : sums) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw ConfigError("intensity sums must be finite and non-negative");
        }
        s_total += s;
    }
    if (!(s_total > 0.0)) {
        throw AllocationError("no contact evidence: all intensity sums are zero");
    }
    std::vector<double> forces;
    forces.reserve(sums.size());
    for (double s : sums) {
        forces.push_back(total_force * (s / s_total));
    }
    return forces;
}

void FusionConfig::validate() const {
    if (!(force_floor >= 0.0)) throw ConfigError("force_floor must be non-negative");
}

void PipelineConfig::validate() const {
    grid.validate();
    reconstruction.validate();
    segmentation.validate();
    air.validate();
    fusion.validate();
    if (!reconstruction.mask.empty() && reconstruction.mask.size() != grid.size()) {
        throw ConfigError("reconstruction mask does not match the pixel grid");
    }
}

namespace {

SensitivityMatrix checked(const PipelineConfig& config, SensitivityMatrix jacobian) {
    config.validate();
    if (!(jacobian.grid == config.grid)) {
        throw ConfigError("sensitivity matrix was computed for a different pixel grid");
    }
    return jacobian;
}

} // namespace

Pipeline::Pipeline(PipelineConfig config, SensitivityMatrix jacobian)
    : config_(std::move(config)),
      reconstructor_(checked(config_, std::move(jacobian)), config_.reconstruction.lambda),
      disk_(StructuringElement::disk(config_.segmentation.disk_radius)) {}

PipelineResult Pipeline::run(const VoltageFrame& baseline, const VoltageFrame& contact,
                             double delta_p) const {
    PipelineResult result;
    result.total_force = force_from_pressure(config_.air, delta_p);

    const std::vector<double> dv = frame_difference(contact, baseline);
    result.image = preprocess(reconstructor_.reconstruct(dv), config_.reconstruction);
    result.mask = BinaryMask(config_.grid.width, config_.grid.height);

    const Normalized norm = normalize(result.image);
    if (norm.degenerate) {
        result.diagnostics.degenerate = true;
        return result;
    }
    try {
        result.diagnostics.threshold = otsu_threshold(norm.image, config_.segmentation.bins);
    } catch (const SegmentationError&) {
        result.diagnostics.degenerate = true;
        return result;
    }
    result.mask = refine_mask(binarize(norm.image, result.diagnostics.threshold), disk_);

    std::vector<Roi> rois = label_components(result.mask, config_.segmentation.connectivity);
    result.diagnostics.raw_roi_count = rois.size();
    std::erase_if(rois, [&](const Roi& r) { return r.pixel_count < config_.segmentation.min_roi_pixels; });
    roi_intensity_sums(result.image, rois);
    std::erase_if(rois, [](const Roi& r) { return !(r.intensity_sum > 0.0); });

    // Allocate, drop ROIs under the force floor, re-allocate until stable.
    std::vector<double> forces;
    while (!rois.empty()) {
        std::vector<double> sums;
        for (const auto& r : rois) sums.push_back(r.intensity_sum);
        forces = allocate_forces(sums, result.total_force);
        if (config_.fusion.force_floor <= 0.0 || result.total_force <= 0.0) break;
        std::vector<Roi> kept;
        // A total below the floor would drop everything; the strongest ROI stays.
        const std::size_t strongest = static_cast<std::size_t>(
            std::max_element(forces.begin(), forces.end()) - forces.begin());
        for (std::size_t i = 0; i < rois.size(); ++i) {
            if (forces[i] >= config_.fusion.force_floor || i == strongest) kept.push_back(std::move(rois[i]));
        }
        if (kept.size() == rois.size()) break;
        rois = std::move(kept);
        forces.clear();
    }
    if (rois.empty()) {
        result.diagnostics.degenerate = true;
        return result;
    }

    double s_total = 0.0;
    for (const auto& r : rois) s_total += r.intensity_sum;
    for (std::size_t i = 0; i < rois.size(); ++i) {
        result.estimates.push_back({rois[i].centroid, forces[i], rois[i].intensity_sum / s_total,
                                    rois[i].id, rois[i].pixel_count, rois[i].intensity_sum});
    }
    std::stable_sort(result.estimates.begin(), result.estimates.end(),
                     [](const ContactEstimate& a, const ContactEstimate& b) { return a.force > b.force; });
    result.diagnostics.roi_count = result.estimates.size();
    result.rois = std::move(rois);
    return result;
}

PipelineResult run_pipeline(const VoltageFrame& baseline, const VoltageFrame& contact,
                            double delta_p, const Pipeline& pipeline) {
    return pipeline.run(baseline, contact, delta_p);
}

} // namespace eitfuse
