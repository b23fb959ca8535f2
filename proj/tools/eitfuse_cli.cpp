// eitfuse command-line front end.

#include "eitfuse/config.hpp"
#include "eitfuse/dataset.hpp"
#include "eitfuse/errors.hpp"
#include "eitfuse/io.hpp"
#include "eitfuse/jacobian.hpp"
#include "eitfuse/reconstruct.hpp"
#include "eitfuse/suites.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <optional>

using namespace eitfuse;
namespace fs = std::filesystem;

namespace {

struct Context {
    AppConfig config;
    Mesh mesh;
};

Context make_context(const std::string& config_path) {
    Context ctx;
    ctx.config = config_path.empty() ? AppConfig{} : load_config(config_path);
    ctx.config.validate();
    ctx.mesh = build_mesh(ctx.config.geometry, ctx.config.nodes_per_side);
    return ctx;
}

SensitivityMatrix jacobian_for(const Context& ctx) {
    const auto& g = ctx.config.geometry;
    return cached_jacobian(ctx.mesh,
                           ConductivityField::uniform(ctx.mesh.element_count(), g.baseline_conductivity),
                           PairSchedule::all_pairs(g.electrode_count), ctx.config.pipeline.grid,
                           ctx.config.cache_dir, ctx.config.current);
}

void emit(const nlohmann::json& j, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << j.dump(2) << '\n';
    } else {
        write_json(j, out);
    }
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("not a number: '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"EIT + air-pressure contact localization and force allocation"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("-c,--config", config_path, "JSON config file")->check(CLI::ExistingFile);

    // generate
    auto* gen = app.add_subcommand("generate", "synthetic dataset");
    std::string gen_out;
    int per_category = 50;
    std::uint64_t gen_seed = 1;
    bool gen_noiseless = false;
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--per-category", per_category, "samples for each of 1..5 contacts");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_flag("--noiseless-pressure", gen_noiseless, "store exact pressure readings");

    // jacobian
    auto* jac = app.add_subcommand("jacobian", "compute and store the sensitivity matrix");
    std::string jac_out;
    jac->add_option("--out", jac_out, "binary output file (default: cache_dir)");

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "frame CSVs to a conductivity image");
    std::string rec_base, rec_contact, rec_pgm, rec_csv, rec_lcurve, rec_lcurve_out;
    bool rec_raw = false;
    rec->add_option("--baseline", rec_base, "baseline frame CSV")->required()->check(CLI::ExistingFile);
    rec->add_option("--contact", rec_contact, "contact frame CSV")->required()->check(CLI::ExistingFile);
    rec->add_option("--pgm", rec_pgm, "image output (PGM)");
    rec->add_option("--csv", rec_csv, "image output (CSV)");
    rec->add_flag("--raw", rec_raw, "skip masking and thresholding");
    rec->add_option("--lcurve", rec_lcurve, "comma separated relative lambdas to sweep");
    rec->add_option("--lcurve-out", rec_lcurve_out, "L-curve JSON output (default stdout)");

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "frames + pressure to contact estimates");
    std::string pipe_base, pipe_contact, pipe_out, pipe_pgm, pipe_mask;
    std::optional<double> pipe_pressure, pipe_force;
    pipe->add_option("--baseline", pipe_base, "baseline frame CSV")->required()->check(CLI::ExistingFile);
    pipe->add_option("--contact", pipe_contact, "contact frame CSV")->required()->check(CLI::ExistingFile);
    auto* opt_p = pipe->add_option("--pressure", pipe_pressure, "pressure change reading");
    auto* opt_f = pipe->add_option("--force", pipe_force, "total force in N (bypasses the air model)");
    opt_p->excludes(opt_f);
    pipe->add_option("--out", pipe_out, "JSON output (default stdout)");
    pipe->add_option("--pgm", pipe_pgm, "preprocessed image (PGM)");
    pipe->add_option("--mask-pgm", pipe_mask, "ROI mask (PGM)");

    // suite
    auto* suite = app.add_subcommand("suite", "run an experiment suite");
    std::string suite_name, suite_spec, suite_out;
    std::uint64_t suite_seed = 1;
    std::optional<int> suite_reps;
    std::optional<double> suite_noise;
    auto* opt_name = suite->add_option("--name", suite_name, "built-in suite: single, two-distance, multi");
    auto* opt_spec = suite->add_option("--spec", suite_spec, "suite spec JSON")->check(CLI::ExistingFile);
    opt_name->excludes(opt_spec);
    suite->add_option("--out", suite_out, "output directory")->required();
    suite->add_option("--seed", suite_seed, "random seed");
    suite->add_option("--repetitions", suite_reps, "repetitions per case (built-in suites)");
    suite->add_option("--noise", suite_noise, "voltage noise as a fraction of baseline RMS");

    // calibrate-air
    auto* cal = app.add_subcommand("calibrate-air", "simulated pressure/force regression");
    std::size_t cal_points = 245;
    std::uint64_t cal_seed = 1;
    double cal_min = 1.0, cal_max = 12.0;
    cal->add_option("--points", cal_points, "number of simulated presses");
    cal->add_option("--seed", cal_seed, "random seed");
    cal->add_option("--min-force", cal_min, "N");
    cal->add_option("--max-force", cal_max, "N");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        Context ctx = make_context(config_path);
        const AppConfig& cfg = ctx.config;

        if (*gen) {
            if (per_category < 1) throw ConfigError("--per-category must be at least 1");
            DatasetConfig dc;
            dc.counts.fill(per_category);
            dc.seed = gen_seed;
            dc.phantoms = cfg.phantoms;
            dc.air = cfg.pipeline.air;
            dc.noisy_pressure = !gen_noiseless;
            dc.threads = cfg.threads;
            const auto t0 = std::chrono::steady_clock::now();
            const Dataset ds = generate_dataset(dc, ctx.mesh, cfg.pipeline.grid);
            write_dataset(ds, dc, ctx.mesh, gen_out);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::cerr << "wrote " << ds.samples.size() << " samples to " << gen_out << " in " << secs
                      << " s\n";
        } else if (*jac) {
            const SensitivityMatrix J = jacobian_for(ctx);
            if (!jac_out.empty()) save_sensitivity(J, jac_out);
            char key[17];
            std::snprintf(key, sizeof key, "%016llx", static_cast<unsigned long long>(J.key));
            emit({{"rows", J.rows()}, {"cols", J.cols()}, {"key", key}, {"file", jac_out}}, "");
        } else if (*rec) {
            const SensitivityMatrix J = jacobian_for(ctx);
            const int n = cfg.geometry.electrode_count;
            const VoltageFrame base = read_frame_csv(rec_base, n);
            const VoltageFrame contact = read_frame_csv(rec_contact, n);
            const std::vector<double> dv = frame_difference(contact, base);
            if (!rec_lcurve.empty()) {
                const auto lambdas = parse_list(rec_lcurve);
                nlohmann::json pts = nlohmann::json::array();
                for (const auto& p : lcurve_sweep(J, dv, lambdas)) {
                    pts.push_back({{"lambda", p.lambda},
                                   {"residual_norm", p.residual_norm},
                                   {"solution_norm", p.solution_norm}});
                }
                emit({{"lcurve", pts}}, rec_lcurve_out);
            }
            ConductivityImage img = tikhonov_reconstruct(J, dv, cfg.pipeline.reconstruction);
            if (!rec_raw) img = preprocess(img, cfg.pipeline.reconstruction);
            if (!rec_pgm.empty()) write_image_pgm(img, rec_pgm);
            if (!rec_csv.empty()) write_image_csv(img, rec_csv);
            if (rec_pgm.empty() && rec_csv.empty() && rec_lcurve.empty()) {
                throw ConfigError("nothing to write: give --pgm, --csv or --lcurve");
            }
        } else if (*pipe) {
            if (!pipe_pressure && !pipe_force) throw ConfigError("give --pressure or --force");
            const int n = cfg.geometry.electrode_count;
            const VoltageFrame base = read_frame_csv(pipe_base, n);
            const VoltageFrame contact = read_frame_csv(pipe_contact, n);
            const Pipeline pipeline(cfg.pipeline, jacobian_for(ctx));
            const double dp =
                pipe_pressure ? *pipe_pressure : pressure_from_force(cfg.pipeline.air, *pipe_force);
            const PipelineResult result = pipeline.run(base, contact, dp);
            if (!pipe_pgm.empty()) write_image_pgm(result.image, pipe_pgm);
            if (!pipe_mask.empty()) write_mask_pgm(result.mask, pipe_mask);
            emit(pipeline_result_to_json(result), pipe_out);
        } else if (*suite) {
            ExperimentSpec spec;
            if (!suite_spec.empty()) {
                spec = experiment_from_json(read_json(suite_spec), cfg.geometry, cfg.phantoms);
            } else if (!suite_name.empty()) {
                spec = builtin_suite(suite_name, cfg.geometry, cfg.phantoms);
                spec.noise = cfg.noise;
            } else {
                throw ConfigError("give --name or --spec");
            }
            if (suite_reps) {
                if (*suite_reps < 1) throw ConfigError("--repetitions must be at least 1");
                for (auto& c : spec.cases) c.repetitions = *suite_reps;
            }
            if (suite_noise) spec.noise.voltage_fraction = *suite_noise;
            spec.noise.validate();
            const Pipeline pipeline(cfg.pipeline, jacobian_for(ctx));
            const MetricsReport report = run_suite(spec, {ctx.mesh, pipeline, cfg.threads}, suite_seed);
            fs::create_directories(suite_out);
            nlohmann::json j = report_to_json(report);
            j["config"] = config_to_json(cfg);
            write_json(j, fs::path(suite_out) / "report.json");
            for (const CaseReport& c : report.cases) {
                if (c.image) write_image_pgm(*c.image, fs::path(suite_out) / (c.name + ".pgm"));
                if (c.mask) write_mask_pgm(*c.mask, fs::path(suite_out) / (c.name + "_mask.pgm"));
            }
            const ScoreEntry& s = report.pooled;
            std::cerr << report.suite << ": matched " << s.matched << ", missed " << s.missed
                      << ", spurious " << s.spurious << ", location " << s.location_error_cm()
                      << " cm, APE " << s.force_ape_percent() << " %\n";
        } else if (*cal) {
            const AirCalibration c = calibrate_air(cfg.pipeline.air, cal_points, cal_min, cal_max, cal_seed);
            emit({{"p1", c.p1}, {"p2", c.p2}, {"r", c.r}, {"force_rmse", c.force_rmse}, {"points", c.points}},
                 "");
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
