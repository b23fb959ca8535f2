#include "eitfuse/suites.hpp"

#include "eitfuse/errors.hpp"
#include "eitfuse/rng.hpp"

#include <cmath>
#include <set>

namespace eitfuse {

void NoiseSettings::validate() const {
    if (!(voltage_fraction >= 0.0) || !std::isfinite(voltage_fraction)) {
        throw ConfigError("voltage noise fraction must be finite and non-negative");
    }
}

void ExperimentSpec::validate(const SensorGeometry& geometry) const {
    noise.validate();
    if (cases.empty()) throw ConfigError("suite '" + name + "' has no cases");
    std::set<std::string> seen;
    for (const SuiteCase& c : cases) {
        if (c.name.empty()) throw ConfigError("suite case without a name");
        if (!seen.insert(c.name).second) throw ConfigError("duplicate suite case '" + c.name + "'");
        if (c.repetitions < 1) throw ConfigError("case '" + c.name + "' needs at least one repetition");
        try {
            c.scenario.validate(geometry);
        } catch (const ConfigError& e) {
            throw ConfigError("case '" + c.name + "': " + e.what());
        }
    }
}

namespace {

std::string trim_number(double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

ExperimentSpec single_suite(const SensorGeometry& g, const PhantomConfig& pc) {
    ExperimentSpec spec;
    spec.name = "single";
    // Indenter diameters 22, 28, 30 and 38 mm go with the four weights.
    const double grams[4] = {100, 200, 300, 500};
    const double radius[4] = {1.1, 1.4, 1.5, 1.9};
    const std::pair<const char*, Point> where[2] = {{"center", {0.0, 0.0}}, {"offset", {-2.5, 2.5}}};
    for (const auto& [label, at] : where) {
        for (int w = 0; w < 4; ++w) {
            SuiteCase c;
            c.name = std::string(label) + "_" + trim_number(grams[w]) + "g";
            c.scenario = make_scenario(
                {contact_from_force(at, radius[w], grams_to_newton(grams[w]), g, pc)});
            spec.cases.push_back(std::move(c));
        }
    }
    spec.targets.location_error_cm = 0.5;
    spec.targets.force_ape_percent = 15.1;
    return spec;
}

ExperimentSpec two_distance_suite(const SensorGeometry& g, const PhantomConfig& pc) {
    ExperimentSpec spec;
    spec.name = "two-distance";
    // 15 mm indenters sharing a 300 g load, d is the gap between their edges.
    // Case 1 runs parallel to the top side 1.5 cm in from the electrodes,
    // case 2 through the center.
    const double r = 0.75;
    const double f = grams_to_newton(300) / 2.0;
    const double case_y[2] = {g.half_side() - 1.5, 0.0};
    for (double d : {1.5, 3.0, 5.0}) {
        for (int k = 0; k < 2; ++k) {
            SuiteCase c;
            c.name = "d" + trim_number(d) + "_case" + std::to_string(k + 1);
            const double x = d / 2 + r;
            c.scenario = make_scenario({contact_from_force({-x, case_y[k]}, r, f, g, pc),
                                        contact_from_force({x, case_y[k]}, r, f, g, pc)});
            spec.cases.push_back(std::move(c));
        }
    }
    spec.targets.location_error_cm = 1.0;
    return spec;
}

ExperimentSpec multi_suite(const SensorGeometry& g, const PhantomConfig& pc) {
    ExperimentSpec spec;
    spec.name = "multi";
    const double r = 0.75;
    const double total = grams_to_newton(500);
    // Two contacts 6 cm apart and a third 3 cm above their midpoint.
    SuiteCase three;
    three.name = "three";
    three.scenario = make_scenario({contact_from_force({-3.0, -1.5}, r, total / 3, g, pc),
                                    contact_from_force({3.0, -1.5}, r, total / 3, g, pc),
                                    contact_from_force({0.0, 1.5}, r, total / 3, g, pc)});
    SuiteCase four;
    four.name = "four";
    four.scenario = make_scenario({contact_from_force({-3.0, -1.5}, r, total / 4, g, pc),
                                   contact_from_force({3.0, -1.5}, r, total / 4, g, pc),
                                   contact_from_force({-3.0, 1.5}, r, total / 4, g, pc),
                                   contact_from_force({3.0, 1.5}, r, total / 4, g, pc)});
    four.targets.location_error_cm = 1.5;
    spec.cases = {std::move(three), std::move(four)};
    spec.targets.force_ape_percent = 20.1;
    return spec;
}

} // namespace

std::vector<std::string> builtin_suite_names() { return {"single", "two-distance", "multi"}; }

ExperimentSpec builtin_suite(const std::string& name, const SensorGeometry& geometry,
                             const PhantomConfig& phantoms) {
    geometry.validate();
    phantoms.validate();
    ExperimentSpec spec;
    if (name == "single") {
        spec = single_suite(geometry, phantoms);
    } else if (name == "two-distance") {
        spec = two_distance_suite(geometry, phantoms);
    } else if (name == "multi") {
        spec = multi_suite(geometry, phantoms);
    } else {
        throw ConfigError("unknown suite '" + name + "' (single, two-distance, multi)");
    }
    spec.validate(geometry);
    return spec;
}

double frame_rms(const VoltageFrame& frame) {
    if (frame.values.empty()) return 0.0;
    double s = 0.0;
    for (double v : frame.values) s += v * v;
    return std::sqrt(s / static_cast<double>(frame.values.size()));
}

VoltageFrame add_voltage_noise(const VoltageFrame& frame, double sigma, Rng& rng) {
    if (!(sigma >= 0.0)) throw ConfigError("noise std-dev must be non-negative");
    VoltageFrame out = frame;
    if (sigma == 0.0) return out;
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : out.values) v += noise(rng);
    return out;
}

MetricsReport run_suite(const ExperimentSpec& spec, const SuiteContext& ctx, std::uint64_t seed) {
    const Mesh& mesh = ctx.mesh;
    spec.validate(mesh.geometry);
    const PipelineConfig& cfg = ctx.pipeline.config();
    const PairSchedule& schedule = ctx.pipeline.reconstructor().jacobian().schedule;

    const ConductivityField reference =
        ConductivityField::uniform(mesh.element_count(), mesh.geometry.baseline_conductivity);
    const VoltageFrame baseline = forward_solve(mesh, reference, schedule);
    const double sigma = spec.noise.voltage_fraction * frame_rms(baseline);

    // Noise-free contact frames, one per case.
    std::vector<std::optional<VoltageFrame>> frames(spec.cases.size());
    std::vector<std::string> frame_errors(spec.cases.size());
    parallel_for(spec.cases.size(), ctx.threads, [&](std::size_t c) {
        try {
            frames[c] = forward_solve(mesh, contacts_to_field(mesh, spec.cases[c].scenario), schedule);
        } catch (const std::exception& e) {
            frame_errors[c] = e.what();
        }
    });

    struct Job {
        std::size_t c;
        int rep;
    };
    std::vector<Job> jobs;
    for (std::size_t c = 0; c < spec.cases.size(); ++c)
        for (int r = 0; r < spec.cases[c].repetitions; ++r) jobs.push_back({c, r});

    std::vector<RunRecord> records(jobs.size());
    std::vector<std::optional<PipelineResult>> firsts(jobs.size());
    parallel_for(jobs.size(), ctx.threads, [&](std::size_t k) {
        const auto [c, rep] = jobs[k];
        const SuiteCase& sc = spec.cases[c];
        RunRecord& rec = records[k];
        rec.case_name = sc.name;
        rec.repetition = rep;
        rec.seed = derive_seed(seed, c, static_cast<std::uint64_t>(rep));
        if (!frames[c]) {
            rec.failed = true;
            rec.error = frame_errors[c];
            return;
        }
        try {
            Rng rng(rec.seed);
            const VoltageFrame contact = add_voltage_noise(*frames[c], sigma, rng);
            const VoltageFrame base =
                spec.noise.baseline_noise ? add_voltage_noise(baseline, sigma, rng) : baseline;
            const double dp = pressure_from_force(cfg.air, sc.scenario.total_force,
                                                  spec.noise.pressure_noise ? &rng : nullptr);
            PipelineResult result = ctx.pipeline.run(base, contact, dp);
            rec.estimates = result.estimates;
            rec.diagnostics = result.diagnostics;
            rec.total_force = result.total_force;
            rec.score = score_result(result, sc.scenario);
            firsts[k] = std::move(result);
        } catch (const std::exception& e) {
            rec.failed = true;
            rec.error = e.what();
        }
    });

    MetricsReport report;
    report.suite = spec.name;
    report.seed = seed;
    report.noise = spec.noise;
    report.targets = spec.targets;
    std::size_t k = 0;
    for (const SuiteCase& sc : spec.cases) {
        CaseReport cr;
        cr.name = sc.name;
        cr.truth_contacts = sc.scenario.contacts.size();
        cr.true_total_force = sc.scenario.total_force;
        for (int r = 0; r < sc.repetitions; ++r, ++k) {
            RunRecord& rec = records[k];
            if (rec.failed) {
                cr.failed_runs += 1;
            } else {
                cr.pooled += rec.score;
                if (rec.estimates.size() == cr.truth_contacts) cr.exact_detection_runs += 1;
                if (!cr.image && firsts[k]) {
                    cr.image = std::move(firsts[k]->image);
                    cr.mask = std::move(firsts[k]->mask);
                }
            }
            cr.runs.push_back(std::move(rec));
        }
        report.pooled += cr.pooled;
        report.cases.push_back(std::move(cr));
    }
    return report;
}

} // namespace eitfuse
