#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "epc/core/error.hpp"

namespace epc {

using Rgb = std::array<std::uint8_t, 3>;

// Interleaved 8-bit RGB raster, row-major from the top-left pixel.
class Image {
public:
    Image() = default;
    Image(int width, int height, Rgb fill = {0, 0, 0});

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    Rgb at(int x, int y) const;
    void set(int x, int y, Rgb value);

    std::span<const std::uint8_t> bytes() const { return data_; }
    std::span<std::uint8_t> bytes() { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

class ImageDecodeError : public DataError {
public:
    using DataError::DataError;
};

// Decodes PNG (any bit depth / colour type, converted to RGB8) or binary PPM (P6).
Image load_image(const std::filesystem::path& path);
Image decode_image(std::span<const std::uint8_t> encoded);

void save_png(const Image& image, const std::filesystem::path& path);

// Bilinear resampling with half-pixel centres and edge clamping.
// Channel values are returned as doubles in the source 0..255 scale.
std::vector<double> resample_bilinear(const Image& image, int out_width, int out_height);

Image resize_bilinear(const Image& image, int out_width, int out_height);

} // namespace epc
