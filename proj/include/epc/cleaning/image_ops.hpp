#pragma once

#include <vector>

#include "epc/core/image.hpp"

namespace epc::cleaning {

struct PixelProbe {
    int x;
    int y;
    Rgb rgb;
};

// Pixel combination that identifies a provider's "no imagery here" placeholder.
struct SentinelSignature {
    std::vector<PixelProbe> probes;
    std::size_t min_matches = 0;

    // Four corner probes of a width x height tile, all `rgb`, every one required.
    static SentinelSignature corners(int width, int height, Rgb rgb);
};

// Default placeholder colour used by corners() in the shipped configuration.
inline constexpr Rgb kDefaultSentinelRgb = {228, 227, 223};

// True iff at least min_matches probes match exactly. Throws InvalidArgument
// when a probe lies outside the image or min_matches is out of range.
bool detect_empty_aerial(const Image& image, const SentinelSignature& signature);

// Row-major H x W boolean mask, true = replace.
struct PixelMask {
    int width = 0;
    int height = 0;
    std::vector<bool> values;

    bool at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

// Masked pixels become `fill`, the rest are copied. Shapes must agree.
Image apply_mask(const Image& image, const PixelMask& mask, Rgb fill);

} // namespace epc::cleaning
