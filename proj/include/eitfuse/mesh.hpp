#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

namespace eitfuse {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Point a, Point b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

/// Square sensing layer with electrodes spaced evenly around the perimeter.
///
/// Lengths are in cm, conductivity in S/m. Electrodes are numbered
/// counter-clockwise starting on the bottom side (y = -L/2) from the left,
/// so that a 90 degree counter-clockwise rotation maps electrode k onto
/// electrode k + electrode_count/4.
struct SensorGeometry {
    double side_length = 10.0;
    int electrode_count = 16;
    double electrode_length = 0.5;
    double electrode_pitch = 2.5;
    double baseline_conductivity = 1.0;

    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    int electrodes_per_side() const { return electrode_count / 4; }
    double half_side() const { return 0.5 * side_length; }

    /// Position of electrode k along its side, measured from the side's
    /// midpoint in the side's own counter-clockwise direction.
    double along_side_center(int k) const;
    Point electrode_center(int k) const;
};

/// Structured triangular mesh of the sensor square, origin at the center.
struct Mesh {
    SensorGeometry geometry;
    int nodes_per_side = 0;
    std::vector<double> axis;  // 1-D node coordinates shared by x and y
    std::vector<Point> nodes;
    std::vector<std::array<int, 3>> elements;  // counter-clockwise
    std::vector<double> element_areas;
    std::vector<std::vector<int>> electrode_nodes;
    // Uniform current density over each electrode segment, lumped onto its
    // nodes. Weights of one electrode sum to 1.
    std::vector<std::vector<std::pair<int, double>>> electrode_weights;
    int ground_node = 0;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t element_count() const { return elements.size(); }
    Point centroid(std::size_t e) const;
};

/// Builds a tensor-product mesh with nodes_per_side nodes along each axis.
/// The axis always contains the electrode end points, so every electrode is
/// resolved by at least two nodes. Diagonals are oriented by quadrant, which
/// makes the mesh invariant under the symmetry group of the square whenever
/// nodes_per_side is odd.
///
/// Throws ConfigError if nodes_per_side is too small to place a node at
/// every electrode end point.
Mesh build_mesh(const SensorGeometry& geometry, int nodes_per_side);

/// Operating density. Electrode-edge singularities make frames converge
/// slowly; doubling from here changes no frame value by more than 1%.
inline constexpr int kDefaultNodesPerSide = 161;

/// Smallest nodes_per_side accepted by build_mesh for this geometry.
int minimum_nodes_per_side(const SensorGeometry& geometry);

} // namespace eitfuse
