#pragma once

#include "eitfuse/fuse.hpp"
#include "eitfuse/metrics.hpp"
#include "eitfuse/phantoms.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace eitfuse {

inline constexpr double kGravity = 9.81;  // m/s^2

/// Force in N of a mass in grams.
inline double grams_to_newton(double grams) { return grams * 1e-3 * kGravity; }

struct NoiseSettings {
    // Voltage noise std-dev as a fraction of the baseline frame RMS.
    double voltage_fraction = 0.0;
    // Also perturb the baseline frame (otherwise it is taken as noise free,
    // e.g. averaged over many frames).
    bool baseline_noise = true;
    bool pressure_noise = false;

    void validate() const;
};

/// Values the suite is compared against; unset fields are not checked.
struct SuiteTargets {
    std::optional<double> location_error_cm;
    std::optional<double> force_error_n;
    std::optional<double> force_ape_percent;
};

struct SuiteCase {
    std::string name;
    Scenario scenario;
    int repetitions = 1;
    SuiteTargets targets;
};

struct ExperimentSpec {
    std::string name;
    std::vector<SuiteCase> cases;
    NoiseSettings noise;
    SuiteTargets targets;

    /// Throws ConfigError for an empty spec, duplicate case names, fewer than
    /// one repetition, or a scenario that does not fit the geometry.
    void validate(const SensorGeometry& geometry) const;
};

/// "single", "two-distance" or "multi". Throws ConfigError for other names.
ExperimentSpec builtin_suite(const std::string& name, const SensorGeometry& geometry = {},
                             const PhantomConfig& phantoms = {});
std::vector<std::string> builtin_suite_names();

struct RunRecord {
    std::string case_name;
    int repetition = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    std::vector<ContactEstimate> estimates;
    PipelineDiagnostics diagnostics;
    double total_force = 0.0;
    ScoreEntry score;
};

struct CaseReport {
    std::string name;
    std::size_t truth_contacts = 0;
    double true_total_force = 0.0;
    std::vector<RunRecord> runs;
    ScoreEntry pooled;  // summed over successful runs
    std::size_t failed_runs = 0;
    // Number of runs whose estimate count equals the number of truths.
    std::size_t exact_detection_runs = 0;
    // Preprocessed image and mask of the first successful repetition.
    std::optional<ConductivityImage> image;
    std::optional<BinaryMask> mask;
};

struct MetricsReport {
    std::string suite;
    std::uint64_t seed = 0;
    NoiseSettings noise;
    std::vector<CaseReport> cases;
    ScoreEntry pooled;
    SuiteTargets targets;
};

/// Holds what a suite needs besides its spec: the mesh, the homogeneous
/// baseline frame and a pipeline.
struct SuiteContext {
    const Mesh& mesh;
    const Pipeline& pipeline;
    unsigned threads = 0;
};

/// Simulates every case x repetition (repetition seeds from
/// derive_seed(seed, case, rep)), runs the pipeline and scores it. Failures of
/// individual runs are recorded in the report instead of thrown.
MetricsReport run_suite(const ExperimentSpec& spec, const SuiteContext& context,
                        std::uint64_t seed);

/// Adds zero-mean Gaussian noise with the given std-dev to every entry.
VoltageFrame add_voltage_noise(const VoltageFrame& frame, double sigma, Rng& rng);
double frame_rms(const VoltageFrame& frame);

} // namespace eitfuse
