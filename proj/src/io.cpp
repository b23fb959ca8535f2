#include "eitfuse/io.hpp"

#include "eitfuse/config.hpp"
#include "eitfuse/errors.hpp"
#include "json_reader.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace eitfuse {

using nlohmann::json;
using detail::JsonReader;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw RuntimeError("cannot write " + path.string());
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// NaN metrics (nothing matched) are written as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

} // namespace

json mesh_to_json(const Mesh& mesh) {
    json nodes = json::array();
    for (const Point& p : mesh.nodes) nodes.push_back({p.x, p.y});
    json elements = json::array();
    for (const auto& e : mesh.elements) elements.push_back({e[0], e[1], e[2]});
    json electrodes = json::array();
    for (std::size_t k = 0; k < mesh.electrode_weights.size(); ++k) {
        json w = json::array();
        for (const auto& [node, weight] : mesh.electrode_weights[k]) w.push_back({node, weight});
        const Point c = mesh.geometry.electrode_center(static_cast<int>(k));
        electrodes.push_back({{"index", k}, {"center", {c.x, c.y}}, {"weights", w}});
    }
    return {{"nodes_per_side", mesh.nodes_per_side},
            {"side_length", mesh.geometry.side_length},
            {"nodes", nodes},
            {"elements", elements},
            {"electrodes", electrodes},
            {"ground_node", mesh.ground_node}};
}

void write_frame_csv(const VoltageFrame& frame, const std::filesystem::path& path) {
    frame.validate();
    std::ofstream out = open_out(path);
    out << "i,j,voltage\n";
    for (std::size_t m = 0; m < frame.schedule.size(); ++m) {
        out << frame.schedule[m].first << ',' << frame.schedule[m].second << ','
            << fmt(frame.values[m]) << '\n';
    }
}

VoltageFrame read_frame_csv(const std::filesystem::path& path, int electrode_count) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open frame file " + path.string());
    VoltageFrame frame;
    frame.schedule = PairSchedule::all_pairs(electrode_count);
    frame.values.assign(frame.schedule.size(), std::nan(""));
    std::vector<char> seen(frame.schedule.size(), 0);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && line.rfind("i,", 0) == 0) continue;
        std::istringstream ss(line);
        std::string a, b, v;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, v)) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected i,j,voltage");
        }
        int i = 0, j = 0;
        double value = 0.0;
        try {
            std::size_t pos = 0;
            i = std::stoi(a, &pos);
            if (pos != a.size()) throw std::invalid_argument(a);
            j = std::stoi(b, &pos);
            if (pos != b.size()) throw std::invalid_argument(b);
            value = std::stod(v, &pos);
        } catch (const std::exception&) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
        }
        if (i < 0 || j < 0 || i >= electrode_count || j >= electrode_count || i == j) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": bad electrode pair");
        }
        const std::size_t m = frame.schedule.index_of(i, j);
        if (seen[m]) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": duplicate pair");
        }
        seen[m] = 1;
        frame.values[m] = value;
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
        throw ConfigError(path.string() + ": frame is missing electrode pairs");
    }
    frame.validate();
    return frame;
}

void write_image_pgm(const ConductivityImage& image, const std::filesystem::path& path) {
    const double lo = image.values.empty() ? 0.0 : image.min();
    const double hi = image.values.empty() ? 0.0 : image.max();
    std::ofstream out = open_out(path);
    out << "P2\n# scale " << fmt(lo) << ' ' << fmt(hi) << '\n'
        << image.grid.width << ' ' << image.grid.height << "\n255\n";
    const double range = hi - lo;
    for (int row = 0; row < image.grid.height; ++row) {
        for (int col = 0; col < image.grid.width; ++col) {
            const double t = range > 0.0 ? (image.at(col, row) - lo) / range : 0.0;
            out << (col ? " " : "") << static_cast<int>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
        }
        out << '\n';
    }
}

void write_mask_pgm(const BinaryMask& mask, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "P2\n" << mask.width << ' ' << mask.height << "\n1\n";
    for (int row = 0; row < mask.height; ++row) {
        for (int col = 0; col < mask.width; ++col) out << (col ? " " : "") << (mask.at(col, row) ? 1 : 0);
        out << '\n';
    }
}

void write_image_csv(const ConductivityImage& image, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    for (int row = 0; row < image.grid.height; ++row) {
        for (int col = 0; col < image.grid.width; ++col) out << (col ? "," : "") << fmt(image.at(col, row));
        out << '\n';
    }
}

json scenario_to_json(const Scenario& s) {
    json contacts = json::array();
    for (const ContactSpec& c : s.contacts) {
        contacts.push_back({{"x", c.center.x},
                            {"y", c.center.y},
                            {"radius", c.radius},
                            {"delta_sigma", c.delta_sigma},
                            {"force", c.force}});
    }
    return {{"contacts", contacts}, {"total_force", s.total_force}};
}

Scenario scenario_from_json(const json& j, const SensorGeometry& geometry, const PhantomConfig& phantoms) {
    JsonReader r(j, "scenario");
    const json& list = r.raw("contacts");
    if (!list.is_array()) throw ConfigError("scenario.contacts: expected an array");
    std::vector<ContactSpec> contacts;
    for (std::size_t i = 0; i < list.size(); ++i) {
        JsonReader c(list[i], "scenario.contacts[" + std::to_string(i) + "]");
        const Point at{c.require<double>("x"), c.require<double>("y")};
        const double radius = c.require<double>("radius");
        const double force = c.require<double>("force");
        if (c.has("delta_sigma")) {
            contacts.push_back({at, radius, c.require<double>("delta_sigma"), force});
        } else {
            contacts.push_back(contact_from_force(at, radius, force, geometry, phantoms));
        }
        c.finish();
    }
    // total_force is derived; accept it only if consistent.
    Scenario s = make_scenario(std::move(contacts));
    if (r.has("total_force")) {
        const double t = r.require<double>("total_force");
        if (std::abs(t - s.total_force) > 1e-9 * std::max(1.0, std::abs(t))) {
            throw ConfigError("scenario.total_force does not equal the sum of contact forces");
        }
    }
    r.finish();
    s.validate(geometry);
    return s;
}

json pipeline_result_to_json(const PipelineResult& result) {
    json est = json::array();
    for (const ContactEstimate& e : result.estimates) {
        est.push_back({{"position_cm", {e.position.x, e.position.y}},
                       {"force_N", e.force},
                       {"intensity_share", e.intensity_share},
                       {"roi_id", e.roi_id}});
    }
    return {{"estimates", est},
            {"total_force_N", result.total_force},
            {"diagnostics",
             {{"threshold", result.diagnostics.threshold},
              {"raw_roi_count", result.diagnostics.raw_roi_count},
              {"roi_count", result.diagnostics.roi_count},
              {"degenerate", result.diagnostics.degenerate}}},
            {"rois", roi_report_to_json(result.rois)}};
}

json roi_report_to_json(const std::vector<Roi>& rois) {
    json out = json::array();
    for (const Roi& r : rois) {
        out.push_back({{"id", r.id},
                       {"pixel_count", r.pixel_count},
                       {"intensity_sum", r.intensity_sum},
                       {"centroid_cm", {r.centroid.x, r.centroid.y}},
                       {"bbox",
                        {{"col_min", r.bbox.col_min},
                         {"row_min", r.bbox.row_min},
                         {"col_max", r.bbox.col_max},
                         {"row_max", r.bbox.row_max}}}});
    }
    return out;
}

namespace {

json score_to_json(const ScoreEntry& s) {
    return {{"matched", s.matched},
            {"missed", s.missed},
            {"spurious", s.spurious},
            {"ape_excluded", s.ape_excluded},
            {"location_error_cm", number(s.location_error_cm())},
            {"force_error_n", number(s.force_error_n())},
            {"force_ape_percent", number(s.force_ape_percent())},
            {"total_normalized_ape_percent", number(s.total_normalized_ape_percent())}};
}

json targets_to_json(const SuiteTargets& t) {
    json j = json::object();
    if (t.location_error_cm) j["location_error_cm"] = *t.location_error_cm;
    if (t.force_error_n) j["force_error_n"] = *t.force_error_n;
    if (t.force_ape_percent) j["force_ape_percent"] = *t.force_ape_percent;
    return j;
}

} // namespace

json report_to_json(const MetricsReport& report) {
    json cases = json::array();
    for (const CaseReport& c : report.cases) {
        json runs = json::array();
        for (const RunRecord& r : c.runs) {
            json est = json::array();
            for (const ContactEstimate& e : r.estimates) {
                est.push_back({{"x", e.position.x}, {"y", e.position.y}, {"force", e.force}});
            }
            json jr = {{"repetition", r.repetition},
                       {"seed", r.seed},
                       {"failed", r.failed},
                       {"detected", r.estimates.size()}};
            if (r.failed) {
                jr["error"] = r.error;
            } else {
                jr["estimates"] = est;
                jr["total_force"] = r.total_force;
                jr["threshold"] = r.diagnostics.threshold;
                jr["metrics"] = score_to_json(r.score);
            }
            runs.push_back(jr);
        }
        cases.push_back({{"name", c.name},
                         {"truth_contacts", c.truth_contacts},
                         {"true_total_force", c.true_total_force},
                         {"failed_runs", c.failed_runs},
                         {"exact_detection_runs", c.exact_detection_runs},
                         {"metrics", score_to_json(c.pooled)},
                         {"runs", runs}});
    }
    return {{"suite", report.suite},
            {"seed", report.seed},
            {"noise", noise_to_json(report.noise)},
            {"targets", targets_to_json(report.targets)},
            {"aggregate", score_to_json(report.pooled)},
            {"cases", cases}};
}

ExperimentSpec experiment_from_json(const json& j, const SensorGeometry& geometry,
                                    const PhantomConfig& phantoms) {
    JsonReader r(j, "");
    ExperimentSpec spec;
    spec.name = r.require<std::string>("name");
    const json& list = r.raw("cases");
    if (!list.is_array()) throw ConfigError("cases: expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
        JsonReader c(list[i], "cases[" + std::to_string(i) + "]");
        SuiteCase sc;
        sc.name = c.require<std::string>("name");
        c.get("repetitions", sc.repetitions);
        json scenario = {{"contacts", c.raw("contacts")}};
        sc.scenario = scenario_from_json(scenario, geometry, phantoms);
        c.finish();
        spec.cases.push_back(std::move(sc));
    }
    if (r.has("noise")) spec.noise = noise_from_json(r.raw("noise"), "noise");
    r.finish();
    spec.validate(geometry);
    return spec;
}

void write_json(const json& j, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

} // namespace eitfuse
