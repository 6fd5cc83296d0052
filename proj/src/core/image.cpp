#include "epc/core/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

namespace epc {

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw InvalidArgument("image dimensions must be positive");
    data_.resize(pixel_count() * 3);
    for (std::size_t i = 0; i < pixel_count(); ++i) std::copy(fill.begin(), fill.end(), data_.begin() + 3 * i);
}

Rgb Image::at(int x, int y) const {
    if (!contains(x, y)) throw InvalidArgument("pixel coordinate outside image");
    const auto off = 3 * (static_cast<std::size_t>(y) * width_ + x);
    return {data_[off], data_[off + 1], data_[off + 2]};
}

void Image::set(int x, int y, Rgb value) {
    if (!contains(x, y)) throw InvalidArgument("pixel coordinate outside image");
    const auto off = 3 * (static_cast<std::size_t>(y) * width_ + x);
    std::copy(value.begin(), value.end(), data_.begin() + off);
}

namespace {

Image decode_png(std::span<const std::uint8_t> encoded) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&png, encoded.data(), encoded.size()))
        throw ImageDecodeError(std::string("PNG decode failed: ") + png.message);
    png.format = PNG_FORMAT_RGB;
    if (png.width == 0 || png.height == 0) {
        png_image_free(&png);
        throw ImageDecodeError("PNG has zero size");
    }
    Image image(static_cast<int>(png.width), static_cast<int>(png.height));
    if (!png_image_finish_read(&png, nullptr, image.bytes().data(), 0, nullptr)) {
        const std::string message = png.message;
        png_image_free(&png);
        throw ImageDecodeError("PNG decode failed: " + message);
    }
    return image;
}

// Reads the next whitespace-delimited PPM header token, skipping comments.
std::string ppm_token(std::span<const std::uint8_t> bytes, std::size_t& pos) {
    while (pos < bytes.size()) {
        if (bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (std::isspace(bytes[pos])) {
            ++pos;
        } else {
            break;
        }
    }
    std::string token;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) token += static_cast<char>(bytes[pos++]);
    return token;
}

Image decode_ppm(std::span<const std::uint8_t> encoded) {
    std::size_t pos = 0;
    if (ppm_token(encoded, pos) != "P6") throw ImageDecodeError("not a binary PPM");
    int dims[3] = {0, 0, 0};
    for (int& d : dims) {
        const auto tok = ppm_token(encoded, pos);
        try {
            d = std::stoi(tok);
        } catch (const std::exception&) {
            throw ImageDecodeError("malformed PPM header");
        }
    }
    if (dims[0] <= 0 || dims[1] <= 0 || dims[2] != 255) throw ImageDecodeError("unsupported PPM header");
    ++pos;  // single whitespace before the raster
    Image image(dims[0], dims[1]);
    if (encoded.size() < pos + image.bytes().size()) throw ImageDecodeError("truncated PPM raster");
    std::copy_n(encoded.begin() + static_cast<std::ptrdiff_t>(pos), image.bytes().size(), image.bytes().begin());
    return image;
}

} // namespace

Image decode_image(std::span<const std::uint8_t> encoded) {
    static constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    if (encoded.size() >= 8 && std::equal(kPngMagic, kPngMagic + 8, encoded.begin())) return decode_png(encoded);
    if (encoded.size() >= 2 && encoded[0] == 'P' && encoded[1] == '6') return decode_ppm(encoded);
    throw ImageDecodeError("unrecognised image format");
}

Image load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageDecodeError("cannot open image: " + path.string());
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_image(bytes);
    } catch (const ImageDecodeError& e) {
        throw ImageDecodeError(path.string() + ": " + e.what());
    }
}

void save_png(const Image& image, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(image.width());
    png.height = static_cast<png_uint_32>(image.height());
    png.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png, path.string().c_str(), 0, image.bytes().data(), 0, nullptr))
        throw DataError("cannot write image " + path.string() + ": " + png.message);
}

std::vector<double> resample_bilinear(const Image& image, int out_width, int out_height) {
    if (out_width <= 0 || out_height <= 0) throw InvalidArgument("target size must be positive");
    std::vector<double> out(static_cast<std::size_t>(out_width) * out_height * 3);
    const double sx = static_cast<double>(image.width()) / out_width;
    const double sy = static_cast<double>(image.height()) / out_height;
    const auto src = image.bytes();
    auto sample = [&](int x, int y, int c) {
        return static_cast<double>(src[3 * (static_cast<std::size_t>(y) * image.width() + x) + c]);
    };
    for (int oy = 0; oy < out_height; ++oy) {
        const double fy = std::clamp((oy + 0.5) * sy - 0.5, 0.0, static_cast<double>(image.height() - 1));
        const int y0 = static_cast<int>(std::floor(fy));
        const int y1 = std::min(y0 + 1, image.height() - 1);
        const double wy = fy - y0;
        for (int ox = 0; ox < out_width; ++ox) {
            const double fx = std::clamp((ox + 0.5) * sx - 0.5, 0.0, static_cast<double>(image.width() - 1));
            const int x0 = static_cast<int>(std::floor(fx));
            const int x1 = std::min(x0 + 1, image.width() - 1);
            const double wx = fx - x0;
            for (int c = 0; c < 3; ++c) {
                const double top = (1 - wx) * sample(x0, y0, c) + wx * sample(x1, y0, c);
                const double bottom = (1 - wx) * sample(x0, y1, c) + wx * sample(x1, y1, c);
                out[3 * (static_cast<std::size_t>(oy) * out_width + ox) + c] = (1 - wy) * top + wy * bottom;
            }
        }
    }
    return out;
}

Image resize_bilinear(const Image& image, int out_width, int out_height) {
    const auto values = resample_bilinear(image, out_width, out_height);
    Image out(out_width, out_height);
    auto bytes = out.bytes();
    for (std::size_t i = 0; i < values.size(); ++i)
        bytes[i] = static_cast<std::uint8_t>(std::clamp(std::lround(values[i]), 0L, 255L));
    return out;
}

} // namespace epc
