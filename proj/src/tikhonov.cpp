#include "eitfuse/errors.hpp"
#include "eitfuse/reconstruct.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace eitfuse {

void ReconstructionConfig::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ConfigError("reconstruction lambda must be positive");
    }
    if (!(threshold_fraction >= 0.0 && threshold_fraction < 1.0)) {
        throw ConfigError("threshold_fraction must lie in [0, 1)");
    }
    if (sign != 1.0 && sign != -1.0) {
        throw ConfigError("reconstruction sign must be +1 or -1");
    }
}

std::vector<double> frame_difference(const VoltageFrame& contact, const VoltageFrame& baseline) {
    contact.validate();
    baseline.validate();
    if (contact.schedule.electrode_count() != baseline.schedule.electrode_count() ||
        contact.values.size() != baseline.values.size()) {
        throw ConfigError("contact and baseline frames use different schedules");
    }
    std::vector<double> dv(contact.values.size());
    for (std::size_t m = 0; m < dv.size(); ++m) {
        dv[m] = contact.values[m] - baseline.values[m];
    }
    return dv;
}

TikhonovReconstructor::TikhonovReconstructor(SensitivityMatrix jacobian, double relative_lambda)
    : jacobian_(std::move(jacobian)) {
    if (!(relative_lambda > 0.0) || !std::isfinite(relative_lambda)) {
        throw ConfigError("reconstruction lambda must be positive");
    }
    const Eigen::MatrixXd& j = jacobian_.matrix;
    if (j.rows() == 0 || j.cols() == 0) {
        throw ConfigError("empty sensitivity matrix");
    }
    Eigen::MatrixXd gram = j * j.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    sigma_max_ = std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
    if (!(sigma_max_ > 0.0)) {
        throw SolverError("sensitivity matrix is identically zero");
    }
    lambda_ = relative_lambda * sigma_max_;
    gram.diagonal().array() += lambda_ * lambda_;
    gram_.compute(gram);
    if (gram_.info() != Eigen::Success) {
        throw SolverError("Tikhonov system factorization failed");
    }
}

ConductivityImage TikhonovReconstructor::reconstruct(std::span<const double> delta_v) const {
    const Eigen::MatrixXd& j = jacobian_.matrix;
    if (delta_v.size() != static_cast<std::size_t>(j.rows())) {
        throw ConfigError("voltage difference has " + std::to_string(delta_v.size()) +
                          " entries, sensitivity matrix has " + std::to_string(j.rows()) + " rows");
    }
    const Eigen::Map<const Eigen::VectorXd> dv(delta_v.data(), static_cast<Eigen::Index>(delta_v.size()));
    if (!dv.allFinite()) {
        throw ConfigError("voltage difference contains non-finite values");
    }
    const Eigen::VectorXd x = j.transpose() * gram_.solve(dv);
    ConductivityImage img(jacobian_.grid);
    Eigen::Map<Eigen::VectorXd>(img.values.data(), x.size()) = x;
    return img;
}

ConductivityImage tikhonov_reconstruct(const SensitivityMatrix& jacobian,
                                       std::span<const double> delta_v,
                                       const ReconstructionConfig& config) {
    config.validate();
    return TikhonovReconstructor(jacobian, config.lambda).reconstruct(delta_v);
}

std::vector<LCurvePoint> lcurve_sweep(const SensitivityMatrix& jacobian,
                                      std::span<const double> delta_v,
                                      std::span<const double> relative_lambdas) {
    std::vector<LCurvePoint> out;
    const Eigen::Map<const Eigen::VectorXd> dv(delta_v.data(), static_cast<Eigen::Index>(delta_v.size()));
    for (double rl : relative_lambdas) {
        const TikhonovReconstructor solver(jacobian, rl);
        const ConductivityImage img = solver.reconstruct(delta_v);
        const Eigen::Map<const Eigen::VectorXd> x(img.values.data(), static_cast<Eigen::Index>(img.values.size()));
        out.push_back({rl, (jacobian.matrix * x - dv).norm(), x.norm()});
    }
    return out;
}

} // namespace eitfuse
