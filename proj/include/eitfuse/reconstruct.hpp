#pragma once

#include "eitfuse/forward.hpp"
#include "eitfuse/jacobian.hpp"
#include "eitfuse/pixel_grid.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <span>
#include <vector>

namespace eitfuse {

struct ReconstructionConfig {
    // Regularization weight relative to the largest singular value of J.
    // Tuned for noiseless frames; noisy data needs something near 3e-2.
    double lambda = 5e-5;
    // Soft-threshold level as a fraction of the (sign-corrected) image max.
    double threshold_fraction = 0.2;
    // Maps the reconstructed change onto "contact is positive". Contacts lower
    // the conductivity, hence -1.
    double sign = -1.0;
    // Sensing-domain mask, row-major over the pixel grid. Empty means all-inside.
    std::vector<bool> mask;

    void validate() const;
};

/// Difference between two frames sharing a schedule (contact - baseline).
/// Throws ConfigError on mismatched schedules or non-finite input.
std::vector<double> frame_difference(const VoltageFrame& contact, const VoltageFrame& baseline);

/// Tikhonov reconstruction with an identity regularizer,
///   x = (J^T J + lambda^2 I)^{-1} J^T dv,
/// evaluated through the equivalent measurement-space system
///   x = J^T (J J^T + lambda^2 I)^{-1} dv,
/// which is 120 x 120 instead of pixels x pixels.
class TikhonovReconstructor {
public:
    /// `relative_lambda` is scaled by the largest singular value of J.
    TikhonovReconstructor(SensitivityMatrix jacobian, double relative_lambda);

    const SensitivityMatrix& jacobian() const { return jacobian_; }
    double lambda() const { return lambda_; }
    double largest_singular_value() const { return sigma_max_; }

    /// Throws ConfigError on length mismatch or non-finite dv.
    ConductivityImage reconstruct(std::span<const double> delta_v) const;

private:
    SensitivityMatrix jacobian_;
    double sigma_max_ = 0.0;
    double lambda_ = 0.0;
    Eigen::LDLT<Eigen::MatrixXd> gram_;
};

ConductivityImage tikhonov_reconstruct(const SensitivityMatrix& jacobian,
                                       std::span<const double> delta_v,
                                       const ReconstructionConfig& config);

/// Masked soft threshold:
///   out = max(s * image - tau, 0) inside the mask, 0 outside,
///   tau = threshold_fraction * max(s * image) over the mask (never negative).
ConductivityImage preprocess(const ConductivityImage& image, const ReconstructionConfig& config);

struct LCurvePoint {
    double lambda = 0.0;  // relative
    double residual_norm = 0.0;
    double solution_norm = 0.0;
};

/// Residual and solution norms over a sweep of relative lambdas.
std::vector<LCurvePoint> lcurve_sweep(const SensitivityMatrix& jacobian,
                                      std::span<const double> delta_v,
                                      std::span<const double> relative_lambdas);

} // namespace eitfuse
