#include "eitfuse/mesh.hpp"

#include "eitfuse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace eitfuse {

namespace {

constexpr double kEps = 1e-9;

// Distance from the corner to the first electrode center on each side.
double corner_offset(const SensorGeometry& g) {
    return 0.5 * (g.side_length - (g.electrodes_per_side() - 1) * g.electrode_pitch);
}

// Positive breakpoints of the 1-D axis: electrode end points and L/2.
std::vector<double> positive_breakpoints(const SensorGeometry& g) {
    std::vector<double> pts{g.half_side()};
    for (int t = 0; t < g.electrodes_per_side(); ++t) {
        const double a = g.along_side_center(t);
        for (double p : {a - 0.5 * g.electrode_length, a + 0.5 * g.electrode_length}) {
            if (p > kEps) {
                pts.push_back(p);
            }
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) { return std::abs(a - b) < kEps; }),
              pts.end());
    return pts;
}

// Splits [-L/2, L/2] into `intervals` pieces, symmetric about 0, with every
// breakpoint on a node. Extra intervals go to the segment with the coarsest
// spacing.
std::vector<double> build_axis(const SensorGeometry& g, int intervals) {
    const std::vector<double> pos = positive_breakpoints(g);
    const std::size_t pairs = pos.size() - 1;

    int central = (intervals % 2 == 1) ? 1 : 2;
    std::vector<int> counts(pairs, 1);
    int remaining = intervals - central - 2 * static_cast<int>(pairs);
    if (remaining < 0) {
        std::ostringstream msg;
        msg << "mesh density too coarse: " << intervals + 1 << " nodes per side cannot resolve "
            << g.electrode_count << " electrodes (need at least " << minimum_nodes_per_side(g)
            << ")";
        throw ConfigError(msg.str());
    }
    while (remaining > 0) {
        double worst = 2.0 * pos[0] / central;
        std::size_t pick = pairs;  // pairs == central segment
        for (std::size_t i = 0; i < pairs; ++i) {
            const double spacing = (pos[i + 1] - pos[i]) / counts[i];
            if (spacing > worst + kEps) {
                worst = spacing;
                pick = i;
            }
        }
        if (pick == pairs) {
            central += 2;
        } else {
            counts[pick] += 1;
        }
        remaining -= 2;
    }

    std::vector<double> half;
    if (central % 2 == 0) {
        const int n = central / 2;
        for (int j = 1; j <= n; ++j) {
            half.push_back(pos[0] * j / n);
        }
    } else {
        // Odd central count: nodes at -p + 2p j / c for j > c/2.
        for (int j = (central + 1) / 2; j <= central; ++j) {
            half.push_back(-pos[0] + 2.0 * pos[0] * j / central);
        }
    }
    for (std::size_t i = 0; i < pairs; ++i) {
        for (int j = 1; j <= counts[i]; ++j) {
            half.push_back(pos[i] + (pos[i + 1] - pos[i]) * j / counts[i]);
        }
    }
    half.back() = g.half_side();

    std::vector<double> axis;
    axis.reserve(intervals + 1);
    for (auto it = half.rbegin(); it != half.rend(); ++it) {
        axis.push_back(-*it);
    }
    if (central % 2 == 0) {
        axis.push_back(0.0);
    }
    axis.insert(axis.end(), half.begin(), half.end());
    return axis;
}

double signed_area(Point a, Point b, Point c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

} // namespace

void SensorGeometry::validate() const {
    std::ostringstream msg;
    if (!(side_length > 0.0)) {
        msg << "side_length must be positive";
    } else if (electrode_count <= 0 || electrode_count % 4 != 0) {
        msg << "electrode_count must be a positive multiple of 4, got " << electrode_count;
    } else if (!(electrode_length > 0.0)) {
        msg << "electrode_length must be positive";
    } else if (!(electrode_pitch > 0.0)) {
        msg << "electrode_pitch must be positive";
    } else if (electrode_count * electrode_pitch > 4.0 * side_length + kEps) {
        msg << "electrode_count x electrode_pitch exceeds the perimeter";
    } else if (electrode_length >= electrode_pitch) {
        msg << "electrode_length must be smaller than electrode_pitch";
    } else if (corner_offset(*this) - 0.5 * electrode_length <= kEps) {
        msg << "electrodes do not fit on a side without reaching the corner";
    } else if (!(baseline_conductivity > 0.0)) {
        msg << "baseline_conductivity must be positive";
    } else {
        return;
    }
    throw ConfigError(msg.str());
}

double SensorGeometry::along_side_center(int k) const {
    const int t = k % electrodes_per_side();
    return -half_side() + corner_offset(*this) + t * electrode_pitch;
}

Point SensorGeometry::electrode_center(int k) const {
    const double a = along_side_center(k);
    const double h = half_side();
    switch (k / electrodes_per_side()) {
    case 0: return {a, -h};
    case 1: return {h, a};
    case 2: return {-a, h};
    default: return {-h, -a};
    }
}

Point Mesh::centroid(std::size_t e) const {
    const auto& el = elements[e];
    return {(nodes[el[0]].x + nodes[el[1]].x + nodes[el[2]].x) / 3.0,
            (nodes[el[0]].y + nodes[el[1]].y + nodes[el[2]].y) / 3.0};
}

int minimum_nodes_per_side(const SensorGeometry& geometry) {
    geometry.validate();
    const auto pairs = static_cast<int>(positive_breakpoints(geometry).size()) - 1;
    return 2 * pairs + 2;
}

Mesh build_mesh(const SensorGeometry& geometry, int nodes_per_side) {
    geometry.validate();
    if (nodes_per_side < 2) {
        throw ConfigError("nodes_per_side must be at least 2");
    }
    Mesh mesh;
    mesh.geometry = geometry;
    mesh.nodes_per_side = nodes_per_side;
    mesh.axis = build_axis(geometry, nodes_per_side - 1);

    const int n = nodes_per_side;
    const auto& ax = mesh.axis;
    mesh.nodes.reserve(static_cast<std::size_t>(n) * n);
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            mesh.nodes.push_back({ax[col], ax[row]});
        }
    }

    auto id = [n](int col, int row) { return row * n + col; };
    mesh.elements.reserve(2 * static_cast<std::size_t>(n - 1) * (n - 1));
    for (int row = 0; row + 1 < n; ++row) {
        for (int col = 0; col + 1 < n; ++col) {
            const int v00 = id(col, row), v10 = id(col + 1, row);
            const int v01 = id(col, row + 1), v11 = id(col + 1, row + 1);
            const double cx = 0.5 * (ax[col] + ax[col + 1]);
            const double cy = 0.5 * (ax[row] + ax[row + 1]);
            if (cx * cy > 0.0) {
                mesh.elements.push_back({v00, v10, v11});
                mesh.elements.push_back({v00, v11, v01});
            } else {
                mesh.elements.push_back({v00, v10, v01});
                mesh.elements.push_back({v10, v11, v01});
            }
        }
    }
    mesh.element_areas.reserve(mesh.elements.size());
    for (const auto& el : mesh.elements) {
        mesh.element_areas.push_back(
            signed_area(mesh.nodes[el[0]], mesh.nodes[el[1]], mesh.nodes[el[2]]));
    }

    // Boundary node chains per side, ordered counter-clockwise.
    std::array<std::vector<int>, 4> sides;
    for (int t = 0; t < n; ++t) {
        sides[0].push_back(id(t, 0));
        sides[1].push_back(id(n - 1, t));
        sides[2].push_back(id(n - 1 - t, n - 1));
        sides[3].push_back(id(0, n - 1 - t));
    }
    auto along = [&](int side, int node) {
        const Point p = mesh.nodes[node];
        switch (side) {
        case 0: return p.x;
        case 1: return p.y;
        case 2: return -p.x;
        default: return -p.y;
        }
    };

    const int ne = geometry.electrode_count;
    mesh.electrode_nodes.resize(ne);
    mesh.electrode_weights.resize(ne);
    for (int k = 0; k < ne; ++k) {
        const int side = k / geometry.electrodes_per_side();
        const double lo = geometry.along_side_center(k) - 0.5 * geometry.electrode_length;
        const double hi = geometry.along_side_center(k) + 0.5 * geometry.electrode_length;
        std::vector<int> chain;
        for (int node : sides[side]) {
            const double a = along(side, node);
            if (a >= lo - kEps && a <= hi + kEps) {
                chain.push_back(node);
            }
        }
        if (chain.size() < 2) {
            throw ConfigError("mesh density too coarse to resolve electrode " + std::to_string(k));
        }
        std::vector<double> w(chain.size(), 0.0);
        for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
            const double len = std::abs(along(side, chain[i + 1]) - along(side, chain[i]));
            w[i] += 0.5 * len / geometry.electrode_length;
            w[i + 1] += 0.5 * len / geometry.electrode_length;
        }
        for (std::size_t i = 0; i < chain.size(); ++i) {
            mesh.electrode_weights[k].emplace_back(chain[i], w[i]);
        }
        mesh.electrode_nodes[k] = std::move(chain);
    }

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        const double d = std::hypot(mesh.nodes[i].x, mesh.nodes[i].y);
        if (d < best - kEps) {
            best = d;
            mesh.ground_node = static_cast<int>(i);
        }
    }
    return mesh;
}

} // namespace eitfuse
