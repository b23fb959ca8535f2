#include "eitfuse/errors.hpp"
#include "eitfuse/segment.hpp"

#include <algorithm>

namespace eitfuse {

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
}

BinaryMask BinaryMask::complement() const {
    BinaryMask out(*this);
    for (auto& b : out.bits) b = b ? 0 : 1;
    return out;
}

StructuringElement StructuringElement::disk(int radius) {
    if (radius < 1) {
        throw ConfigError("structuring element radius must be at least 1");
    }
    StructuringElement se;
    se.radius = radius;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            if (dx * dx + dy * dy <= radius * radius) {
                se.offsets.emplace_back(dx, dy);
            }
        }
    }
    return se;
}

namespace {

BinaryMask pad(const BinaryMask& m, int margin) {
    BinaryMask out(m.width + 2 * margin, m.height + 2 * margin);
    for (int r = 0; r < m.height; ++r)
        for (int c = 0; c < m.width; ++c)
            out.set(c + margin, r + margin, m.at(c, r));
    return out;
}

BinaryMask crop(const BinaryMask& m, int margin) {
    BinaryMask out(m.width - 2 * margin, m.height - 2 * margin);
    for (int r = 0; r < out.height; ++r)
        for (int c = 0; c < out.width; ++c)
            out.set(c, r, m.at(c + margin, r + margin));
    return out;
}

// Raw raster operations; pixels outside read as false.
BinaryMask erode_raw(const BinaryMask& m, const StructuringElement& se) {
    BinaryMask out(m.width, m.height);
    for (int r = 0; r < m.height; ++r) {
        for (int c = 0; c < m.width; ++c) {
            bool keep = true;
            for (auto [dx, dy] : se.offsets) {
                const int cc = c + dx, rr = r + dy;
                if (!m.inside(cc, rr) || !m.at(cc, rr)) {
                    keep = false;
                    break;
                }
            }
            out.set(c, r, keep);
        }
    }
    return out;
}

BinaryMask dilate_raw(const BinaryMask& m, const StructuringElement& se) {
    BinaryMask out(m.width, m.height);
    for (int r = 0; r < m.height; ++r) {
        for (int c = 0; c < m.width; ++c) {
            if (!m.at(c, r)) continue;
            for (auto [dx, dy] : se.offsets) {
                const int cc = c + dx, rr = r + dy;
                if (out.inside(cc, rr)) out.set(cc, rr, true);
            }
        }
    }
    return out;
}

} // namespace

BinaryMask erode(const BinaryMask& mask, const StructuringElement& se) {
    return erode_raw(mask, se);
}

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se) {
    return dilate_raw(mask, se);
}

BinaryMask morph_open(const BinaryMask& mask, const StructuringElement& se) {
    // The erosion result lies inside the raster, so cropping the dilation loses nothing.
    return dilate_raw(erode_raw(mask, se), se);
}

BinaryMask morph_close(const BinaryMask& mask, const StructuringElement& se) {
    // Dilation may spill up to `radius` past the border; keep it for the erosion.
    const BinaryMask padded = pad(mask, se.radius);
    return crop(erode_raw(dilate_raw(padded, se), se), se.radius);
}

BinaryMask refine_mask(const BinaryMask& mask, const StructuringElement& se) {
    return morph_close(morph_open(mask, se), se);
}

} // namespace eitfuse
