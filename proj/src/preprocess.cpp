#include "eitfuse/errors.hpp"
#include "eitfuse/reconstruct.hpp"

#include <algorithm>
#include <limits>

namespace eitfuse {

ConductivityImage preprocess(const ConductivityImage& image, const ReconstructionConfig& config) {
    config.validate();
    if (!image.all_finite()) {
        throw ConfigError("cannot preprocess a non-finite image");
    }
    const std::size_t n = image.values.size();
    if (!config.mask.empty() && config.mask.size() != n) {
        throw ConfigError("reconstruction mask does not match the image size");
    }
    auto inside = [&](std::size_t p) { return config.mask.empty() || config.mask[p]; };

    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < n; ++p) {
        if (inside(p)) peak = std::max(peak, config.sign * image.values[p]);
    }
    const double tau = std::max(0.0, config.threshold_fraction * peak);

    ConductivityImage out(image.grid);
    for (std::size_t p = 0; p < n; ++p) {
        if (inside(p)) {
            out.values[p] = std::max(config.sign * image.values[p] - tau, 0.0);
        }
    }
    return out;
}

} // namespace eitfuse
