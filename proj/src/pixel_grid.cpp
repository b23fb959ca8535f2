#include "eitfuse/pixel_grid.hpp"

#include "eitfuse/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace eitfuse {

void PixelGrid::validate() const {
    if (width < 1 || height < 1) {
        throw ConfigError("pixel grid dimensions must be positive");
    }
    if (!(side_length > 0.0)) {
        throw ConfigError("pixel grid side length must be positive");
    }
}

Point PixelGrid::center(int col, int row) const {
    const double h = 0.5 * side_length;
    return {-h + (col + 0.5) * dx(), h - (row + 0.5) * dy()};
}

double ConductivityImage::max() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double ConductivityImage::min() const {
    return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

double ConductivityImage::sum() const {
    return std::accumulate(values.begin(), values.end(), 0.0);
}

double ConductivityImage::norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

bool ConductivityImage::all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

namespace {

using Polygon = std::vector<Point>;

// Sutherland-Hodgman against one half-plane: keep points with inside(p) true.
template <class Inside, class Cross>
Polygon clip(const Polygon& in, Inside inside, Cross cross) {
    Polygon out;
    if (in.empty()) return out;
    Point prev = in.back();
    bool prev_in = inside(prev);
    for (const Point& cur : in) {
        const bool cur_in = inside(cur);
        if (cur_in) {
            if (!prev_in) out.push_back(cross(prev, cur));
            out.push_back(cur);
        } else if (prev_in) {
            out.push_back(cross(prev, cur));
        }
        prev = cur;
        prev_in = cur_in;
    }
    return out;
}

Point cross_x(Point a, Point b, double x) {
    const double t = (x - a.x) / (b.x - a.x);
    return {x, a.y + t * (b.y - a.y)};
}

Point cross_y(Point a, Point b, double y) {
    const double t = (y - a.y) / (b.y - a.y);
    return {a.x + t * (b.x - a.x), y};
}

double polygon_area(const Polygon& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % poly.size()];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * std::abs(a);
}

} // namespace

double triangle_rect_overlap(std::span<const Point, 3> tri, double x0, double x1, double y0,
                             double y1) {
    Polygon poly(tri.begin(), tri.end());
    poly = clip(poly, [x0](Point p) { return p.x >= x0; },
                [x0](Point a, Point b) { return cross_x(a, b, x0); });
    poly = clip(poly, [x1](Point p) { return p.x <= x1; },
                [x1](Point a, Point b) { return cross_x(a, b, x1); });
    poly = clip(poly, [y0](Point p) { return p.y >= y0; },
                [y0](Point a, Point b) { return cross_y(a, b, y0); });
    poly = clip(poly, [y1](Point p) { return p.y <= y1; },
                [y1](Point a, Point b) { return cross_y(a, b, y1); });
    return poly.size() < 3 ? 0.0 : polygon_area(poly);
}

PixelOverlap compute_overlap(const Mesh& mesh, const PixelGrid& grid) {
    grid.validate();
    if (std::abs(grid.side_length - mesh.geometry.side_length) > 1e-9 * mesh.geometry.side_length) {
        throw ConfigError("pixel grid extent does not match the mesh domain");
    }
    const double h = 0.5 * grid.side_length;
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto& el = mesh.elements[e];
        const std::array<Point, 3> tri{mesh.nodes[el[0]], mesh.nodes[el[1]], mesh.nodes[el[2]]};
        double xmin = tri[0].x, xmax = tri[0].x, ymin = tri[0].y, ymax = tri[0].y;
        for (const Point& p : tri) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
        const int c0 = std::clamp(static_cast<int>(std::floor((xmin + h) / grid.dx())), 0, grid.width - 1);
        const int c1 = std::clamp(static_cast<int>(std::floor((xmax + h) / grid.dx())), 0, grid.width - 1);
        const int r0 = std::clamp(static_cast<int>(std::floor((h - ymax) / grid.dy())), 0, grid.height - 1);
        const int r1 = std::clamp(static_cast<int>(std::floor((h - ymin) / grid.dy())), 0, grid.height - 1);
        for (int row = r0; row <= r1; ++row) {
            const double ytop = h - row * grid.dy();
            const double ybot = h - (row + 1) * grid.dy();
            for (int col = c0; col <= c1; ++col) {
                const double xl = -h + col * grid.dx();
                const double xr = -h + (col + 1) * grid.dx();
                const double a = triangle_rect_overlap(tri, xl, xr, ybot, ytop);
                if (a > 0.0) {
                    triplets.emplace_back(static_cast<int>(e),
                                          static_cast<int>(grid.index(col, row)), a);
                }
            }
        }
    }
    PixelOverlap out{grid, {}};
    out.areas.resize(static_cast<int>(mesh.element_count()), static_cast<int>(grid.size()));
    out.areas.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

} // namespace eitfuse
