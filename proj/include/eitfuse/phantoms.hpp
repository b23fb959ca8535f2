#pragma once

#include "eitfuse/forward.hpp"
#include "eitfuse/mesh.hpp"
#include "eitfuse/pixel_grid.hpp"
#include "eitfuse/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace eitfuse {

/// One circular contact. delta_sigma is the (negative) conductivity change.
struct ContactSpec {
    Point center;
    double radius = 0.0;       // cm
    double delta_sigma = 0.0;  // S/m
    double force = 0.0;        // N
};

struct Scenario {
    std::vector<ContactSpec> contacts;
    double total_force = 0.0;  // N, equal to the sum of contact forces

    /// Throws ConfigError unless every disk is inside the square, disks do not
    /// overlap, radii are positive, forces non-negative, and the total matches.
    void validate(const SensorGeometry& geometry) const;
};

enum class ForceCoupling {
    Proportional,  // F_i proportional to |delta_sigma_i| * area_i
    Independent,   // F_i proportional to an independent uniform weight
};

/// Sampling ranges for synthetic contacts.
struct PhantomConfig {
    // Radius range in model units; one unit is `unit_scale_cm` (0 = half the side).
    double radius_min_units = 0.1;
    double radius_max_units = 0.2;
    double unit_scale_cm = 0.0;
    // Anomaly conductivity range. Absolute S/m, or multiples of the baseline
    // when conductivity_relative is set.
    double conductivity_min = 0.5;
    double conductivity_max = 0.9;
    bool conductivity_relative = false;
    // Scenario total force range (N).
    double total_force_min = 1.0;
    double total_force_max = 12.0;
    ForceCoupling coupling = ForceCoupling::Proportional;
    // Contact pressure (N/cm^2) per S/m of conductivity drop, used when a
    // contact is specified by its force instead of its conductivity.
    double coupling_kappa = 2.0;
    // Placement attempts per scenario before giving up.
    int rejection_budget = 10000;

    void validate() const;
    double radius_min_cm(const SensorGeometry& g) const;
    double radius_max_cm(const SensorGeometry& g) const;
};

/// Samples n_contacts non-overlapping disks. Centers are uniform in the
/// square inset by the radius. Throws SamplingError when the rejection
/// budget is exhausted.
Scenario sample_scenario(Rng& rng, int n_contacts, const SensorGeometry& geometry,
                         const PhantomConfig& config);

/// Contact of a given force: delta_sigma = -F / (kappa * pi r^2).
/// Throws ConfigError if that would drive the conductivity to zero or below.
ContactSpec contact_from_force(Point center, double radius, double force,
                               const SensorGeometry& geometry, const PhantomConfig& config);

Scenario make_scenario(std::vector<ContactSpec> contacts);

/// Baseline everywhere, baseline + delta_sigma for elements whose centroid
/// lies in a contact disk.
ConductivityField contacts_to_field(const Mesh& mesh, const Scenario& scenario);

/// |delta_sigma| at pixel centers inside a disk, 0 elsewhere.
ConductivityImage ground_truth_image(const Scenario& scenario, const PixelGrid& grid);

/// Pressure-channel model: dP = p1 F + p2, with additive Gaussian noise.
struct AirPressureModel {
    double p1 = 0.192;
    double p2 = -0.088;
    // 0.192 * 1.15 N: reproduces a 1.15 N force RMSE after inversion.
    double noise_sigma = 0.192 * 1.15;

    void validate() const;
};

/// Throws ConfigError for negative force. Noise is drawn from `noise` when given.
double pressure_from_force(const AirPressureModel& model, double total_force, Rng* noise = nullptr);

/// (dP - p2) / p1, clamped at zero.
double force_from_pressure(const AirPressureModel& model, double delta_p);

struct AirCalibration {
    double p1 = 0.0;
    double p2 = 0.0;
    double r = 0.0;          // Pearson correlation of force and pressure
    double force_rmse = 0.0; // N, forces recovered through the fitted line
    std::size_t points = 0;
};

/// Presses `points` random forces uniform in [force_min, force_max] through
/// the noisy model and regresses pressure on force.
AirCalibration calibrate_air(const AirPressureModel& truth, std::size_t points, double force_min,
                             double force_max, std::uint64_t seed);

} // namespace eitfuse
