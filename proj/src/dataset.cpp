#include "eitfuse/dataset.hpp"

#include "eitfuse/errors.hpp"
#include "eitfuse/io.hpp"
#include "eitfuse/rng.hpp"

#include <cstdio>
#include <exception>
#include <numeric>

namespace eitfuse {

void DatasetConfig::validate() const {
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] < 1) {
            throw ConfigError("dataset category " + std::to_string(k + 1) +
                              " needs at least one sample");
        }
    }
    phantoms.validate();
    air.validate();
}

std::size_t DatasetConfig::total() const {
    return static_cast<std::size_t>(std::accumulate(counts.begin(), counts.end(), 0));
}

namespace {

[[noreturn]] void rethrow_with_index(std::exception_ptr ep, std::size_t index) {
    const std::string prefix = "sample " + std::to_string(index) + ": ";
    try {
        std::rethrow_exception(ep);
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.what());
    } catch (const SamplingError& e) {
        throw SamplingError(prefix + e.what());
    } catch (const SolverError& e) {
        throw SolverError(prefix + e.what());
    } catch (const std::exception& e) {
        throw RuntimeError(prefix + e.what());
    }
}

} // namespace

Dataset generate_dataset(const DatasetConfig& config, const Mesh& mesh, const PixelGrid& grid) {
    config.validate();
    grid.validate();
    const PairSchedule schedule = PairSchedule::all_pairs(mesh.geometry.electrode_count);

    // Category of each sample: the first counts[0] have one contact, and so on.
    std::vector<int> contacts_of;
    for (std::size_t k = 0; k < config.counts.size(); ++k) {
        contacts_of.insert(contacts_of.end(), static_cast<std::size_t>(config.counts[k]),
                           static_cast<int>(k) + 1);
    }

    Dataset ds;
    ds.baseline = forward_solve(
        mesh, ConductivityField::uniform(mesh.element_count(), mesh.geometry.baseline_conductivity),
        schedule);
    ds.samples.resize(contacts_of.size());
    std::vector<std::exception_ptr> errors(contacts_of.size());

    parallel_for(contacts_of.size(), config.threads, [&](std::size_t i) {
        try {
            DatasetSample& s = ds.samples[i];
            s.index = i;
            s.seed = derive_seed(config.seed, i);
            Rng rng(s.seed);
            s.scenario = sample_scenario(rng, contacts_of[i], mesh.geometry, config.phantoms);
            s.contact = forward_solve(mesh, contacts_to_field(mesh, s.scenario), schedule);
            s.truth = ground_truth_image(s.scenario, grid);
            s.pressure = pressure_from_force(config.air, s.scenario.total_force,
                                             config.noisy_pressure ? &rng : nullptr);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    // Report the lowest failing index so errors are reproducible too.
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (errors[i]) rethrow_with_index(errors[i], i);
    }
    return ds;
}

void write_dataset(const Dataset& dataset, const DatasetConfig& config, const Mesh& mesh,
                   const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "samples");
    write_frame_csv(dataset.baseline, dir / "baseline.csv");

    nlohmann::json samples = nlohmann::json::array();
    for (const DatasetSample& s : dataset.samples) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "%05zu", s.index);
        const std::string base = std::string("samples/") + stem;
        write_frame_csv(s.contact, dir / (base + "_frame.csv"));
        write_image_pgm(s.truth, dir / (base + "_truth.pgm"));
        write_image_csv(s.truth, dir / (base + "_truth.csv"));
        nlohmann::json js = scenario_to_json(s.scenario);
        js["index"] = s.index;
        js["seed"] = s.seed;
        js["n_contacts"] = s.scenario.contacts.size();
        js["pressure"] = s.pressure;
        js["frame"] = base + "_frame.csv";
        js["truth_pgm"] = base + "_truth.pgm";
        js["truth_csv"] = base + "_truth.csv";
        samples.push_back(std::move(js));
    }
    const PixelGrid& grid = dataset.samples.empty() ? PixelGrid{} : dataset.samples.front().truth.grid;
    nlohmann::json manifest = {
        {"seed", config.seed},
        {"counts", config.counts},
        {"total", dataset.samples.size()},
        {"nodes_per_side", mesh.nodes_per_side},
        {"electrode_count", mesh.geometry.electrode_count},
        {"side_length", mesh.geometry.side_length},
        {"grid", {{"width", grid.width}, {"height", grid.height}}},
        {"noisy_pressure", config.noisy_pressure},
        {"baseline", "baseline.csv"},
        {"samples", samples},
    };
    write_json(manifest, dir / "manifest.json");
}

} // namespace eitfuse
