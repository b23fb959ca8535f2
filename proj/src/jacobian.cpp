#include "eitfuse/jacobian.hpp"

#include "eitfuse/errors.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace eitfuse {

namespace {

constexpr std::array<char, 8> kMagic{'E', 'I', 'T', 'J', 'A', 'C', '0', '1'};

// FNV-1a over the raw bytes of the hashed values.
class Fnv1a {
public:
    template <class T>
    void add(const T& v) {
        unsigned char buf[sizeof(T)];
        std::memcpy(buf, &v, sizeof(T));
        for (unsigned char c : buf) {
            state_ = (state_ ^ c) * 0x100000001b3ULL;
        }
    }
    std::uint64_t value() const { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

} // namespace

std::uint64_t sensitivity_key(const Mesh& mesh, const ConductivityField& reference,
                              const PixelGrid& grid, double current) {
    Fnv1a h;
    const auto& g = mesh.geometry;
    h.add(g.side_length);
    h.add(g.electrode_count);
    h.add(g.electrode_length);
    h.add(g.electrode_pitch);
    h.add(g.baseline_conductivity);
    h.add(mesh.nodes_per_side);
    h.add(grid.width);
    h.add(grid.height);
    h.add(grid.side_length);
    h.add(current);
    for (double v : reference.values()) {
        h.add(v);
    }
    return h.value();
}

SensitivityMatrix compute_jacobian(const Mesh& mesh, const ConductivityField& reference,
                                   const PairSchedule& schedule, const PixelGrid& grid,
                                   double current) {
    return compute_jacobian(mesh, reference, schedule, compute_overlap(mesh, grid), current);
}

SensitivityMatrix compute_jacobian(const Mesh& mesh, const ConductivityField& reference,
                                   const PairSchedule& schedule, const PixelOverlap& overlap,
                                   double current) {
    if (schedule.electrode_count() != mesh.geometry.electrode_count) {
        throw ConfigError("schedule electrode count does not match geometry");
    }
    if (static_cast<std::size_t>(overlap.areas.rows()) != mesh.element_count()) {
        throw ConfigError("pixel overlap was computed for a different mesh");
    }
    const ForwardSolver solver(mesh, reference);

    // Element-level sensitivities, one row per measurement.
    const auto ne = static_cast<Eigen::Index>(mesh.element_count());
    Eigen::MatrixXd element_sens(static_cast<Eigen::Index>(schedule.size()), ne);
    for (std::size_t m = 0; m < schedule.size(); ++m) {
        const auto [i, j] = schedule[m];
        const Eigen::VectorXd u = solver.pair_potential(i, j);
        for (Eigen::Index e = 0; e < ne; ++e) {
            // V = I w^T K w with w the unit-current potential, so
            // dV/d sigma_e = -I A_e |grad w|^2; the area is carried by the overlap.
            element_sens(static_cast<Eigen::Index>(m), e) =
                -current * element_gradient(mesh, static_cast<std::size_t>(e), u).squaredNorm();
        }
    }

    SensitivityMatrix out;
    out.schedule = schedule;
    out.grid = overlap.grid;
    out.matrix = element_sens * overlap.areas;
    out.key = sensitivity_key(mesh, reference, overlap.grid, current);
    if (!out.matrix.allFinite()) {
        throw SolverError("sensitivity matrix contains non-finite entries");
    }
    return out;
}

ConductivityField perturb_pixel(const Mesh& mesh, const ConductivityField& reference,
                                const PixelOverlap& overlap, std::size_t pixel, double delta) {
    std::vector<double> v(reference.values().begin(), reference.values().end());
    for (int e = 0; e < overlap.areas.outerSize(); ++e) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(overlap.areas, e); it; ++it) {
            if (static_cast<std::size_t>(it.col()) == pixel) {
                v[e] += delta * it.value() / mesh.element_areas[e];
            }
        }
    }
    return ConductivityField(std::move(v));
}

void save_sensitivity(const SensitivityMatrix& s, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw RuntimeError("cannot write sensitivity cache " + path.string());
    }
    auto put = [&out](const auto& v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
    out.write(kMagic.data(), kMagic.size());
    put(s.key);
    put(static_cast<std::int64_t>(s.matrix.rows()));
    put(static_cast<std::int64_t>(s.matrix.cols()));
    put(static_cast<std::int32_t>(s.schedule.electrode_count()));
    put(static_cast<std::int32_t>(s.grid.width));
    put(static_cast<std::int32_t>(s.grid.height));
    put(s.grid.side_length);
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = s.matrix;
    out.write(reinterpret_cast<const char*>(rm.data()),
              static_cast<std::streamsize>(rm.size() * sizeof(double)));
    if (!out) {
        throw RuntimeError("failed writing sensitivity cache " + path.string());
    }
}

std::optional<SensitivityMatrix> load_sensitivity(const std::filesystem::path& path,
                                                  std::uint64_t expected_key) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    auto get = [&in](auto& v) { in.read(reinterpret_cast<char*>(&v), sizeof(v)); };
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) return std::nullopt;
    SensitivityMatrix s;
    std::int64_t rows = 0, cols = 0;
    std::int32_t electrodes = 0, w = 0, h = 0;
    get(s.key);
    get(rows);
    get(cols);
    get(electrodes);
    get(w);
    get(h);
    get(s.grid.side_length);
    if (!in || s.key != expected_key || rows <= 0 || cols <= 0) return std::nullopt;
    s.grid.width = w;
    s.grid.height = h;
    s.schedule = PairSchedule::all_pairs(electrodes);
    if (static_cast<std::int64_t>(s.schedule.size()) != rows ||
        static_cast<std::int64_t>(s.grid.size()) != cols) {
        return std::nullopt;
    }
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
    in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
    if (!in) return std::nullopt;
    s.matrix = rm;
    return s;
}

SensitivityMatrix cached_jacobian(const Mesh& mesh, const ConductivityField& reference,
                                  const PairSchedule& schedule, const PixelGrid& grid,
                                  const std::filesystem::path& cache_dir, double current) {
    if (cache_dir.empty()) {
        return compute_jacobian(mesh, reference, schedule, grid, current);
    }
    const std::uint64_t key = sensitivity_key(mesh, reference, grid, current);
    std::ostringstream name;
    name << "jacobian_" << std::hex << key << ".bin";
    const auto path = cache_dir / name.str();
    if (auto hit = load_sensitivity(path, key)) {
        return *std::move(hit);
    }
    SensitivityMatrix s = compute_jacobian(mesh, reference, schedule, grid, current);
    std::filesystem::create_directories(cache_dir);
    save_sensitivity(s, path);
    return s;
}

} // namespace eitfuse
