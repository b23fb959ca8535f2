#include "eitfuse/errors.hpp"
#include "eitfuse/phantoms.hpp"

#include <cmath>

namespace eitfuse {

void AirPressureModel::validate() const {
    if (!(p1 > 0.0)) throw ConfigError("air model p1 must be positive");
    if (!(noise_sigma >= 0.0)) throw ConfigError("air model noise_sigma must be non-negative");
}

double pressure_from_force(const AirPressureModel& model, double total_force, Rng* noise) {
    if (!(total_force >= 0.0)) throw ConfigError("total force must be non-negative");
    double dp = model.p1 * total_force + model.p2;
    if (noise != nullptr && model.noise_sigma > 0.0) {
        std::normal_distribution<double> gauss(0.0, model.noise_sigma);
        dp += gauss(*noise);
    }
    return dp;
}

double force_from_pressure(const AirPressureModel& model, double delta_p) {
    if (model.p1 == 0.0) throw ConfigError("air model p1 must be non-zero");
    return std::max(0.0, (delta_p - model.p2) / model.p1);
}

AirCalibration calibrate_air(const AirPressureModel& truth, std::size_t points, double force_min,
                             double force_max, std::uint64_t seed) {
    truth.validate();
    if (points < 3) throw ConfigError("calibration needs at least 3 points");
    if (!(force_min >= 0.0) || force_max <= force_min) throw ConfigError("invalid force range");
    Rng rng(seed);
    std::uniform_real_distribution<double> pick(force_min, force_max);
    std::vector<double> f(points), p(points);
    for (std::size_t i = 0; i < points; ++i) {
        f[i] = pick(rng);
        p[i] = pressure_from_force(truth, f[i], &rng);
    }
    double mf = 0.0, mp = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        mf += f[i];
        mp += p[i];
    }
    mf /= static_cast<double>(points);
    mp /= static_cast<double>(points);
    double sff = 0.0, spp = 0.0, sfp = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        sff += (f[i] - mf) * (f[i] - mf);
        spp += (p[i] - mp) * (p[i] - mp);
        sfp += (f[i] - mf) * (p[i] - mp);
    }
    AirCalibration out;
    out.points = points;
    out.p1 = sfp / sff;
    out.p2 = mp - out.p1 * mf;
    out.r = sfp / std::sqrt(sff * spp);
    const AirPressureModel fitted{out.p1, out.p2, 0.0};
    double se = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double err = force_from_pressure(fitted, p[i]) - f[i];
        se += err * err;
    }
    out.force_rmse = std::sqrt(se / static_cast<double>(points));
    return out;
}

} // namespace eitfuse
