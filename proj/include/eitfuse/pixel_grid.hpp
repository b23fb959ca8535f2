#pragma once

#include "eitfuse/mesh.hpp"

#include <Eigen/SparseCore>

#include <span>
#include <vector>

namespace eitfuse {

/// Raster over the sensor square. Pixel index = row * width + col, row 0 at
/// the top edge (y = +L/2), col 0 at the left edge (x = -L/2).
struct PixelGrid {
    int width = 64;
    int height = 64;
    double side_length = 10.0;

    void validate() const;
    std::size_t size() const { return static_cast<std::size_t>(width) * height; }
    double dx() const { return side_length / width; }
    double dy() const { return side_length / height; }
    double pixel_area() const { return dx() * dy(); }
    std::size_t index(int col, int row) const {
        return static_cast<std::size_t>(row) * width + col;
    }
    Point center(int col, int row) const;
    Point center(std::size_t p) const {
        return center(static_cast<int>(p % width), static_cast<int>(p / width));
    }

    friend bool operator==(const PixelGrid&, const PixelGrid&) = default;
};

/// Signed conductivity change on a PixelGrid, row-major.
struct ConductivityImage {
    PixelGrid grid;
    std::vector<double> values;

    ConductivityImage() = default;
    explicit ConductivityImage(const PixelGrid& g, double fill = 0.0)
        : grid(g), values(g.size(), fill) {}

    double& at(int col, int row) { return values[grid.index(col, row)]; }
    double at(int col, int row) const { return values[grid.index(col, row)]; }
    double max() const;
    double min() const;
    double sum() const;
    double norm() const;
    bool all_finite() const;
};

/// Element-by-pixel overlap areas (cm^2). Row sums equal element areas,
/// column sums equal the pixel area.
struct PixelOverlap {
    PixelGrid grid;
    Eigen::SparseMatrix<double, Eigen::RowMajor> areas;  // elements x pixels
};

/// Throws ConfigError if the grid does not cover exactly the mesh domain.
PixelOverlap compute_overlap(const Mesh& mesh, const PixelGrid& grid);

/// Area of the intersection of a triangle with an axis-aligned rectangle.
double triangle_rect_overlap(std::span<const Point, 3> tri, double x0, double x1, double y0,
                             double y1);

} // namespace eitfuse
