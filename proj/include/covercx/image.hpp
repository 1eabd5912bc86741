#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace covercx {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Row-major 8-bit RGB raster. The pixel count always equals width * height.
class RGBImage {
public:
    RGBImage() = default;
    RGBImage(std::size_t width, std::size_t height, Rgb fill = {});
    RGBImage(std::size_t width, std::size_t height, std::vector<Rgb> pixels);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    bool empty() const noexcept { return pixels_.empty(); }

    Rgb& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }
    const Rgb& at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }

    std::span<const Rgb> pixels() const noexcept { return pixels_; }
    std::span<Rgb> pixels() noexcept { return pixels_; }

    friend bool operator==(const RGBImage&, const RGBImage&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<Rgb> pixels_;
};

// Row-major 8-bit luminance raster.
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(std::size_t width, std::size_t height, std::uint8_t fill = 0);
    GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }

    std::uint8_t& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }
    std::uint8_t at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }

    std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
    std::span<std::uint8_t> pixels() noexcept { return pixels_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// Decodes a PNG or JPEG file held in memory. Alpha is composited over white;
/// grayscale and palette sources are expanded to RGB. Throws CorruptImage.
RGBImage decode_image(std::span<const std::uint8_t> bytes);

/// BT.601 luma, rounded half up: round(0.299 r + 0.587 g + 0.114 b).
GrayImage to_grayscale(const RGBImage& img);

RGBImage gray_to_rgb(const GrayImage& img);

/// Bilinear resize with edge-clamped sampling (pixel-centre alignment).
/// Resizing to the source dimensions returns an identical copy.
RGBImage resize(const RGBImage& img, std::size_t width, std::size_t height);

/// Header-less RGB24 dump: 3 * width * height bytes, row-major, R,G,B order.
std::vector<std::uint8_t> to_raw_bitmap(const RGBImage& img);

/// Lossless PNG encoding, used for fixtures and tests.
std::vector<std::uint8_t> encode_png(const RGBImage& img);
std::vector<std::uint8_t> encode_png_rgba(std::size_t width, std::size_t height,
                                          std::span<const std::uint8_t> rgba);

}  // namespace covercx
