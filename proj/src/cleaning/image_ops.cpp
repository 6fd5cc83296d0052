#include "epc/cleaning/image_ops.hpp"

namespace epc::cleaning {

SentinelSignature SentinelSignature::corners(int width, int height, Rgb rgb) {
    SentinelSignature s;
    s.probes = {{0, 0, rgb}, {width - 1, 0, rgb}, {0, height - 1, rgb}, {width - 1, height - 1, rgb}};
    s.min_matches = s.probes.size();
    return s;
}

bool detect_empty_aerial(const Image& image, const SentinelSignature& signature) {
    if (signature.min_matches < 1 || signature.min_matches > signature.probes.size())
        throw InvalidArgument("sentinel min_matches must be in [1, probe count]");
    std::size_t matches = 0;
    for (const auto& probe : signature.probes) {
        if (!image.contains(probe.x, probe.y))
            throw InvalidArgument("sentinel probe (" + std::to_string(probe.x) + ", " + std::to_string(probe.y) +
                                  ") outside " + std::to_string(image.width()) + "x" +
                                  std::to_string(image.height()) + " image");
        if (image.at(probe.x, probe.y) == probe.rgb) ++matches;
    }
    return matches >= signature.min_matches;
}

Image apply_mask(const Image& image, const PixelMask& mask, Rgb fill) {
    if (mask.width != image.width() || mask.height != image.height() ||
        mask.values.size() != image.pixel_count())
        throw InvalidArgument("mask shape does not match image");
    Image out = image;
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x)
            if (mask.at(x, y)) out.set(x, y, fill);
    return out;
}

} // namespace epc::cleaning
