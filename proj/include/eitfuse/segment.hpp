#pragma once

#include "eitfuse/mesh.hpp"
#include "eitfuse/pixel_grid.hpp"

#include <vector>

namespace eitfuse {

/// Boolean raster with the same layout as a ConductivityImage.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<unsigned char> bits;

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

    bool at(int col, int row) const { return bits[static_cast<std::size_t>(row) * width + col] != 0; }
    void set(int col, int row, bool v) { bits[static_cast<std::size_t>(row) * width + col] = v ? 1 : 0; }
    bool inside(int col, int row) const { return col >= 0 && row >= 0 && col < width && row < height; }
    std::size_t count() const;
    bool empty() const { return count() == 0; }
    BinaryMask complement() const;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

/// Discrete disk: offsets (dx, dy) with dx^2 + dy^2 <= r^2.
struct StructuringElement {
    int radius = 2;
    std::vector<std::pair<int, int>> offsets;

    /// Throws ConfigError for radius < 1.
    static StructuringElement disk(int radius);
};

// Morphology treats everything outside the raster as false. Dilation and
// erosion are computed on the unbounded plane and then cropped, so closing
// is extensive even for objects touching the border.
BinaryMask erode(const BinaryMask& mask, const StructuringElement& se);
BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se);
BinaryMask morph_open(const BinaryMask& mask, const StructuringElement& se);
BinaryMask morph_close(const BinaryMask& mask, const StructuringElement& se);
/// Opening followed by closing.
BinaryMask refine_mask(const BinaryMask& mask, const StructuringElement& se);

struct Normalized {
    ConductivityImage image;
    bool degenerate = false;  // input was constant; image is all zero
};

/// Affine map of [min, max] onto [0, 1].
Normalized normalize(const ConductivityImage& image);

/// Histogram bin of a value in [0, 1]: floor(v * bins), clamped to bins - 1.
int histogram_bin(double value, int bins);

/// Otsu threshold over bin edges k / bins, k = 1 .. bins - 1. Between-class
/// variances are compared exactly in integer arithmetic; ties go to the
/// lower edge. Throws SegmentationError when all pixels fall in one bin.
double otsu_threshold(const ConductivityImage& normalized, int bins = 256);

/// True where value >= threshold.
BinaryMask binarize(const ConductivityImage& image, double threshold);

struct BoundingBox {
    int col_min = 0, row_min = 0, col_max = 0, row_max = 0;
};

struct Roi {
    int id = 0;
    BinaryMask mask;
    std::size_t pixel_count = 0;
    double intensity_sum = 0.0;
    Point centroid;  // cm
    BoundingBox bbox;
};

/// Connected components (4- or 8-connectivity), ordered by descending pixel
/// count, then by first pixel in raster order. Ids are 1-based in that order.
std::vector<Roi> label_components(const BinaryMask& mask, int connectivity = 8);

/// Fills intensity_sum and the intensity-weighted centroid. ROIs with zero
/// intensity fall back to the unweighted mask centroid.
void roi_intensity_sums(const ConductivityImage& image, std::vector<Roi>& rois);

struct SegmentationConfig {
    int bins = 256;
    int disk_radius = 2;
    int connectivity = 8;
    std::size_t min_roi_pixels = 4;

    void validate() const;
};

} // namespace eitfuse
