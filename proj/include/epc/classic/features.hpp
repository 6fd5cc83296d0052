#pragma once

#include <vector>

#include "epc/core/image.hpp"

namespace epc::classic {

// Raw-pixel feature vector: bilinear resample to side x side (side 0 keeps the
// native size), channel-interleaved row-major, scaled to [0, 1].
std::vector<double> flatten_image(const Image& image, int side = 0);

} // namespace epc::classic
