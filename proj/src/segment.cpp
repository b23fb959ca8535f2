#include "eitfuse/errors.hpp"
#include "eitfuse/segment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>

namespace eitfuse {

void SegmentationConfig::validate() const {
    if (bins < 2) throw ConfigError("otsu bins must be at least 2");
    if (disk_radius < 1) throw ConfigError("structuring element radius must be at least 1");
    if (connectivity != 4 && connectivity != 8) throw ConfigError("connectivity must be 4 or 8");
}

Normalized normalize(const ConductivityImage& image) {
    if (!image.all_finite()) {
        throw ConfigError("cannot normalize a non-finite image");
    }
    Normalized out{ConductivityImage(image.grid), false};
    const double lo = image.min();
    const double hi = image.max();
    const double range = hi - lo;
    if (!(range > 0.0)) {
        out.degenerate = true;
        return out;
    }
    for (std::size_t p = 0; p < image.values.size(); ++p) {
        out.image.values[p] = std::clamp((image.values[p] - lo) / range, 0.0, 1.0);
    }
    return out;
}

int histogram_bin(double value, int bins) {
    const double scaled = std::floor(value * bins);
    if (!(scaled > 0.0)) return 0;
    return static_cast<int>(std::min<double>(scaled, bins - 1));
}

double otsu_threshold(const ConductivityImage& normalized, int bins) {
    if (bins < 2) throw ConfigError("otsu bins must be at least 2");
    std::vector<std::int64_t> hist(static_cast<std::size_t>(bins), 0);
    for (double v : normalized.values) {
        hist[static_cast<std::size_t>(histogram_bin(v, bins))] += 1;
    }
    std::int64_t total_n = 0, total_s = 0;
    for (int k = 0; k < bins; ++k) {
        total_n += hist[k];
        total_s += hist[k] * k;
    }
    // Between-class variance at edge k is (S0 N - S N0)^2 / (N0 N1) up to a
    // constant factor. Compared exactly while it fits in 128 bits.
    const bool exact = total_n <= (std::int64_t{1} << 18);
    using u128 = unsigned __int128;
    u128 best_num = 0, best_den = 1;
    long double best_value = -1.0L;
    int best_edge = -1;
    std::int64_t n0 = 0, s0 = 0;
    for (int k = 1; k < bins; ++k) {
        n0 += hist[k - 1];
        s0 += hist[k - 1] * (k - 1);
        const std::int64_t n1 = total_n - n0;
        if (n0 == 0 || n1 == 0) continue;
        const std::int64_t diff = s0 * total_n - total_s * n0;
        const u128 mag = static_cast<u128>(diff < 0 ? -diff : diff);
        const u128 num = mag * mag;
        const u128 den = static_cast<u128>(n0) * static_cast<u128>(n1);
        bool better;
        if (exact) {
            better = best_edge < 0 || num * best_den > best_num * den;
        } else {
            const long double value = static_cast<long double>(diff) * static_cast<long double>(diff) /
                                      (static_cast<long double>(n0) * static_cast<long double>(n1));
            better = value > best_value;
            if (better) best_value = value;
        }
        if (better) {
            best_num = num;
            best_den = den;
            best_edge = k;
        }
    }
    if (best_edge < 0) {
        throw SegmentationError("image is single-valued; no Otsu threshold exists");
    }
    return static_cast<double>(best_edge) / bins;
}

BinaryMask binarize(const ConductivityImage& image, double threshold) {
    BinaryMask m(image.grid.width, image.grid.height);
    for (std::size_t p = 0; p < image.values.size(); ++p) {
        m.bits[p] = image.values[p] >= threshold ? 1 : 0;
    }
    return m;
}

std::vector<Roi> label_components(const BinaryMask& mask, int connectivity) {
    if (connectivity != 4 && connectivity != 8) {
        throw ConfigError("connectivity must be 4 or 8");
    }
    static constexpr int k4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    static constexpr int k8[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1},
                                     {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    std::vector<int> label(mask.bits.size(), 0);
    std::vector<Roi> rois;
    std::deque<std::pair<int, int>> queue;
    for (int row = 0; row < mask.height; ++row) {
        for (int col = 0; col < mask.width; ++col) {
            const std::size_t start = static_cast<std::size_t>(row) * mask.width + col;
            if (!mask.bits[start] || label[start] != 0) continue;
            Roi roi;
            roi.mask = BinaryMask(mask.width, mask.height);
            roi.bbox = {col, row, col, row};
            const int id = static_cast<int>(rois.size()) + 1;
            label[start] = id;
            queue.emplace_back(col, row);
            while (!queue.empty()) {
                const auto [c, r] = queue.front();
                queue.pop_front();
                roi.mask.set(c, r, true);
                roi.pixel_count += 1;
                roi.bbox.col_min = std::min(roi.bbox.col_min, c);
                roi.bbox.col_max = std::max(roi.bbox.col_max, c);
                roi.bbox.row_min = std::min(roi.bbox.row_min, r);
                roi.bbox.row_max = std::max(roi.bbox.row_max, r);
                for (int n = 0; n < connectivity; ++n) {
                    const int cc = c + (connectivity == 4 ? k4[n][0] : k8[n][0]);
                    const int rr = r + (connectivity == 4 ? k4[n][1] : k8[n][1]);
                    if (!mask.inside(cc, rr)) continue;
                    const std::size_t q = static_cast<std::size_t>(rr) * mask.width + cc;
                    if (mask.bits[q] && label[q] == 0) {
                        label[q] = id;
                        queue.emplace_back(cc, rr);
                    }
                }
            }
            rois.push_back(std::move(roi));
        }
    }
    // Discovery order is raster order of the first pixel; stable sort keeps it for ties.
    std::stable_sort(rois.begin(), rois.end(),
                     [](const Roi& a, const Roi& b) { return a.pixel_count > b.pixel_count; });
    for (std::size_t i = 0; i < rois.size(); ++i) {
        rois[i].id = static_cast<int>(i) + 1;
    }
    return rois;
}

void roi_intensity_sums(const ConductivityImage& image, std::vector<Roi>& rois) {
    const PixelGrid& g = image.grid;
    for (Roi& roi : rois) {
        if (roi.mask.width != g.width || roi.mask.height != g.height) {
            throw ConfigError("ROI mask does not match the image dimensions");
        }
        double s = 0.0, sx = 0.0, sy = 0.0, ux = 0.0, uy = 0.0;
        std::size_t n = 0;
        for (int row = 0; row < g.height; ++row) {
            for (int col = 0; col < g.width; ++col) {
                if (!roi.mask.at(col, row)) continue;
                const double v = image.at(col, row);
                const Point c = g.center(col, row);
                s += v;
                sx += v * c.x;
                sy += v * c.y;
                ux += c.x;
                uy += c.y;
                ++n;
            }
        }
        roi.intensity_sum = s;
        if (s > 0.0) {
            roi.centroid = {sx / s, sy / s};
        } else if (n > 0) {
            roi.centroid = {ux / n, uy / n};
        }
    }
}

} // namespace eitfuse
