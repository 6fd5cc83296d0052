#include "epc/classic/features.hpp"

namespace epc::classic {

std::vector<double> flatten_image(const Image& image, int side) {
    if (side < 0) throw InvalidArgument("flatten_image: side must be non-negative");
    std::vector<double> out;
    if (side == 0 || (side == image.width() && side == image.height())) {
        out.assign(image.bytes().begin(), image.bytes().end());
    } else {
        out = resample_bilinear(image, side, side);
    }
    for (auto& v : out) v /= 255.0;
    return out;
}

} // namespace epc::classic
