#include "eitfuse/config.hpp"

#include "eitfuse/errors.hpp"
#include "json_reader.hpp"

#include <cmath>
#include <fstream>

namespace eitfuse {

using nlohmann::json;
using detail::JsonReader;

void AppConfig::validate() const {
    geometry.validate();
    if (nodes_per_side < minimum_nodes_per_side(geometry)) {
        throw ConfigError("mesh.nodes_per_side must be at least " +
                          std::to_string(minimum_nodes_per_side(geometry)) + " for this geometry");
    }
    if (!(current > 0.0) || !std::isfinite(current)) {
        throw ConfigError("current must be positive");
    }
    pipeline.validate();
    if (pipeline.grid.side_length != geometry.side_length) {
        throw ConfigError("grid.side_length must equal geometry.side_length");
    }
    phantoms.validate();
    noise.validate();
}

namespace {

void read_geometry(JsonReader r, SensorGeometry& g) {
    r.get("side_length", g.side_length);
    r.get("electrode_count", g.electrode_count);
    r.get("electrode_length", g.electrode_length);
    r.get("electrode_pitch", g.electrode_pitch);
    r.get("baseline_conductivity", g.baseline_conductivity);
    r.finish();
}

void read_grid(JsonReader r, PixelGrid& g) {
    r.get("width", g.width);
    r.get("height", g.height);
    r.get("side_length", g.side_length);
    r.finish();
}

void read_reconstruction(JsonReader r, ReconstructionConfig& c) {
    r.get("lambda", c.lambda);
    r.get("threshold_fraction", c.threshold_fraction);
    r.get("sign", c.sign);
    if (r.has("mask")) {
        const json& m = r.raw("mask");
        if (!m.is_array()) throw ConfigError("reconstruction.mask: expected an array of 0/1");
        c.mask.clear();
        for (const json& v : m) {
            if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
                throw ConfigError("reconstruction.mask: entries must be 0 or 1");
            }
            c.mask.push_back(v.get<int>() == 1);
        }
    }
    r.finish();
}

void read_segmentation(JsonReader r, SegmentationConfig& c) {
    r.get("bins", c.bins);
    r.get("disk_radius", c.disk_radius);
    r.get("connectivity", c.connectivity);
    r.get("min_roi_pixels", c.min_roi_pixels);
    r.finish();
}

void read_air(JsonReader r, AirPressureModel& a) {
    r.get("p1", a.p1);
    r.get("p2", a.p2);
    r.get("noise_sigma", a.noise_sigma);
    r.finish();
}

void read_fusion(JsonReader r, FusionConfig& f) {
    r.get("force_floor", f.force_floor);
    r.finish();
}

void read_phantoms(JsonReader r, PhantomConfig& p) {
    r.get("radius_min_units", p.radius_min_units);
    r.get("radius_max_units", p.radius_max_units);
    r.get("unit_scale_cm", p.unit_scale_cm);
    r.get("conductivity_min", p.conductivity_min);
    r.get("conductivity_max", p.conductivity_max);
    r.get("conductivity_relative", p.conductivity_relative);
    r.get("total_force_min", p.total_force_min);
    r.get("total_force_max", p.total_force_max);
    if (r.has("coupling")) {
        const auto s = r.require<std::string>("coupling");
        if (s == "proportional") {
            p.coupling = ForceCoupling::Proportional;
        } else if (s == "independent") {
            p.coupling = ForceCoupling::Independent;
        } else {
            throw ConfigError("phantoms.coupling: expected 'proportional' or 'independent'");
        }
    }
    r.get("coupling_kappa", p.coupling_kappa);
    r.get("rejection_budget", p.rejection_budget);
    r.finish();
}

} // namespace

NoiseSettings noise_from_json(const json& j, const std::string& path) {
    NoiseSettings n;
    JsonReader r(j, path);
    r.get("voltage_fraction", n.voltage_fraction);
    r.get("baseline_noise", n.baseline_noise);
    r.get("pressure_noise", n.pressure_noise);
    r.finish();
    n.validate();
    return n;
}

json noise_to_json(const NoiseSettings& n) {
    return {{"voltage_fraction", n.voltage_fraction},
            {"baseline_noise", n.baseline_noise},
            {"pressure_noise", n.pressure_noise}};
}

AppConfig config_from_json(const json& j) {
    AppConfig c;
    JsonReader r(j, "");
    if (r.has("geometry")) read_geometry(r.child("geometry"), c.geometry);
    if (r.has("mesh")) {
        JsonReader m = r.child("mesh");
        m.get("nodes_per_side", c.nodes_per_side);
        m.finish();
    }
    r.get("current", c.current);
    // The grid follows the geometry unless set explicitly.
    c.pipeline.grid.side_length = c.geometry.side_length;
    if (r.has("grid")) read_grid(r.child("grid"), c.pipeline.grid);
    if (r.has("reconstruction")) read_reconstruction(r.child("reconstruction"), c.pipeline.reconstruction);
    if (r.has("segmentation")) read_segmentation(r.child("segmentation"), c.pipeline.segmentation);
    if (r.has("air")) read_air(r.child("air"), c.pipeline.air);
    if (r.has("fusion")) read_fusion(r.child("fusion"), c.pipeline.fusion);
    if (r.has("phantoms")) read_phantoms(r.child("phantoms"), c.phantoms);
    if (r.has("noise")) c.noise = noise_from_json(r.raw("noise"), "noise");
    r.get("cache_dir", c.cache_dir);
    r.get("threads", c.threads);
    r.finish();
    c.validate();
    return c;
}

AppConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

json config_to_json(const AppConfig& c) {
    const auto& g = c.geometry;
    const auto& p = c.pipeline;
    const auto& ph = c.phantoms;
    json mask = json::array();
    for (bool b : p.reconstruction.mask) mask.push_back(b ? 1 : 0);
    json recon = {{"lambda", p.reconstruction.lambda},
                  {"threshold_fraction", p.reconstruction.threshold_fraction},
                  {"sign", p.reconstruction.sign}};
    if (!p.reconstruction.mask.empty()) recon["mask"] = mask;
    return {
        {"geometry",
         {{"side_length", g.side_length},
          {"electrode_count", g.electrode_count},
          {"electrode_length", g.electrode_length},
          {"electrode_pitch", g.electrode_pitch},
          {"baseline_conductivity", g.baseline_conductivity}}},
        {"mesh", {{"nodes_per_side", c.nodes_per_side}}},
        {"current", c.current},
        {"grid", {{"width", p.grid.width}, {"height", p.grid.height}, {"side_length", p.grid.side_length}}},
        {"reconstruction", recon},
        {"segmentation",
         {{"bins", p.segmentation.bins},
          {"disk_radius", p.segmentation.disk_radius},
          {"connectivity", p.segmentation.connectivity},
          {"min_roi_pixels", p.segmentation.min_roi_pixels}}},
        {"air", {{"p1", p.air.p1}, {"p2", p.air.p2}, {"noise_sigma", p.air.noise_sigma}}},
        {"fusion", {{"force_floor", p.fusion.force_floor}}},
        {"phantoms",
         {{"radius_min_units", ph.radius_min_units},
          {"radius_max_units", ph.radius_max_units},
          {"unit_scale_cm", ph.unit_scale_cm},
          {"conductivity_min", ph.conductivity_min},
          {"conductivity_max", ph.conductivity_max},
          {"conductivity_relative", ph.conductivity_relative},
          {"total_force_min", ph.total_force_min},
          {"total_force_max", ph.total_force_max},
          {"coupling", ph.coupling == ForceCoupling::Proportional ? "proportional" : "independent"},
          {"coupling_kappa", ph.coupling_kappa},
          {"rejection_budget", ph.rejection_budget}}},
        {"noise", noise_to_json(c.noise)},
        {"cache_dir", c.cache_dir},
        {"threads", c.threads},
    };
}

} // namespace eitfuse
