#include "covercx/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <string>

#include <jpeglib.h>
#include <jerror.h>
#include <png.h>

#include "covercx/errors.hpp"

namespace covercx {

RGBImage::RGBImage(std::size_t width, std::size_t height, Rgb fill)
    : width_(width), height_(height), pixels_(width * height, fill) {}

RGBImage::RGBImage(std::size_t width, std::size_t height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (pixels_.size() != width_ * height_) {
        throw InvalidDimensions("pixel count " + std::to_string(pixels_.size()) +
                                " does not match " + std::to_string(width_) + "x" +
                                std::to_string(height_));
    }
}

GrayImage::GrayImage(std::size_t width, std::size_t height, std::uint8_t fill)
    : width_(width), height_(height), pixels_(width * height, fill) {}

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (pixels_.size() != width_ * height_) {
        throw InvalidDimensions("pixel count " + std::to_string(pixels_.size()) +
                                " does not match " + std::to_string(width_) + "x" +
                                std::to_string(height_));
    }
}

namespace {

constexpr std::array<std::uint8_t, 8> kPngSignature{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

bool is_png(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= kPngSignature.size() &&
           std::equal(kPngSignature.begin(), kPngSignature.end(), bytes.begin());
}

bool is_jpeg(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 && bytes[2] == 0xff;
}

std::uint8_t over_white(std::uint8_t c, std::uint8_t a) {
    const unsigned v = unsigned{c} * a + 255u * (255u - a);
    return static_cast<std::uint8_t>((v + 127u) / 255u);
}

RGBImage decode_png(std::span<const std::uint8_t> bytes) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        std::string msg = image.message;
        png_image_free(&image);
        throw CorruptImage("png: " + msg);
    }
    image.format = PNG_FORMAT_RGBA;
    if (image.width == 0 || image.height == 0) {
        png_image_free(&image);
        throw CorruptImage("png: zero-sized image");
    }
    std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, rgba.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw CorruptImage("png: " + msg);
    }
    const std::size_t w = image.width;
    const std::size_t h = image.height;
    std::vector<Rgb> px(w * h);
    for (std::size_t i = 0; i < px.size(); ++i) {
        const std::uint8_t* s = &rgba[4 * i];
        const std::uint8_t a = s[3];
        if (a == 255) {
            px[i] = {s[0], s[1], s[2]};
        } else {
            px[i] = {over_white(s[0], a), over_white(s[1], a), over_white(s[2], a)};
        }
    }
    return RGBImage(w, h, std::move(px));
}

struct JpegErrorManager {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
    bool truncated;
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

void jpeg_emit_message(j_common_ptr cinfo, int level) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    // A premature end of data is only a warning to libjpeg, which then pads
    // the scan with grey. Such files are treated as corrupt.
    if (level < 0 && cinfo->err->msg_code == JWRN_JPEG_EOF) {
        err->truncated = true;
    }
}

// Kept free of non-trivial locals so longjmp cannot skip a destructor.
bool decode_jpeg_raw(std::span<const std::uint8_t> bytes, std::vector<std::uint8_t>& out,
                     std::size_t& width, std::size_t& height, JpegErrorManager& jerr) {
    jpeg_decompress_struct cinfo;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    jerr.pub.emit_message = jpeg_emit_message;
    jerr.truncated = false;
    jerr.message[0] = '\0';
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        return false;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    width = cinfo.output_width;
    height = cinfo.output_height;
    const std::size_t stride = width * 3;
    out.resize(stride * height);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.data() + std::size_t{cinfo.output_scanline} * stride;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return true;
}

RGBImage decode_jpeg(std::span<const std::uint8_t> bytes) {
    std::vector<std::uint8_t> raw;
    std::size_t w = 0;
    std::size_t h = 0;
    JpegErrorManager jerr;
    if (!decode_jpeg_raw(bytes, raw, w, h, jerr)) {
        throw CorruptImage(std::string("jpeg: ") + jerr.message);
    }
    if (jerr.truncated) {
        throw CorruptImage("jpeg: premature end of data");
    }
    if (w == 0 || h == 0) {
        throw CorruptImage("jpeg: zero-sized image");
    }
    std::vector<Rgb> px(w * h);
    for (std::size_t i = 0; i < px.size(); ++i) {
        px[i] = {raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
    }
    return RGBImage(w, h, std::move(px));
}

}  // namespace

RGBImage decode_image(std::span<const std::uint8_t> bytes) {
    if (is_png(bytes)) return decode_png(bytes);
    if (is_jpeg(bytes)) return decode_jpeg(bytes);
    throw CorruptImage("unrecognized image format");
}

GrayImage to_grayscale(const RGBImage& img) {
    std::vector<std::uint8_t> out(img.width() * img.height());
    const auto px = img.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) {
        // Exact decimal weights in integer arithmetic; +500 rounds half up.
        const unsigned v = 299u * px[i].r + 587u * px[i].g + 114u * px[i].b + 500u;
        out[i] = static_cast<std::uint8_t>(std::min(v / 1000u, 255u));
    }
    return GrayImage(img.width(), img.height(), std::move(out));
}

RGBImage gray_to_rgb(const GrayImage& img) {
    std::vector<Rgb> out(img.width() * img.height());
    const auto px = img.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {px[i], px[i], px[i]};
    return RGBImage(img.width(), img.height(), std::move(out));
}

namespace {

struct Tap {
    std::size_t lo;
    std::size_t hi;
    double frac;
};

std::vector<Tap> bilinear_taps(std::size_t src, std::size_t dst) {
    std::vector<Tap> taps(dst);
    const double scale = static_cast<double>(src) / static_cast<double>(dst);
    const double max_pos = static_cast<double>(src - 1);
    for (std::size_t i = 0; i < dst; ++i) {
        double pos = (static_cast<double>(i) + 0.5) * scale - 0.5;
        pos = std::clamp(pos, 0.0, max_pos);
        const auto lo = static_cast<std::size_t>(pos);
        taps[i] = {lo, std::min(lo + 1, src - 1), pos - static_cast<double>(lo)};
    }
    return taps;
}

}  // namespace

RGBImage resize(const RGBImage& img, std::size_t width, std::size_t height) {
    if (width == 0 || height == 0) {
        throw InvalidDimensions("resize target must be non-zero, got " + std::to_string(width) +
                                "x" + std::to_string(height));
    }
    if (img.empty()) throw InvalidDimensions("cannot resize an empty image");
    if (width == img.width() && height == img.height()) return img;

    const auto xs = bilinear_taps(img.width(), width);
    const auto ys = bilinear_taps(img.height(), height);
    std::vector<Rgb> out(width * height);
    auto lerp = [](double a, double b, double t) { return a + (b - a) * t; };
    for (std::size_t y = 0; y < height; ++y) {
        const Tap& ty = ys[y];
        for (std::size_t x = 0; x < width; ++x) {
            const Tap& tx = xs[x];
            const Rgb& p00 = img.at(tx.lo, ty.lo);
            const Rgb& p10 = img.at(tx.hi, ty.lo);
            const Rgb& p01 = img.at(tx.lo, ty.hi);
            const Rgb& p11 = img.at(tx.hi, ty.hi);
            auto channel = [&](std::uint8_t Rgb::*c) {
                const double top = lerp(p00.*c, p10.*c, tx.frac);
                const double bottom = lerp(p01.*c, p11.*c, tx.frac);
                const double v = std::floor(lerp(top, bottom, ty.frac) + 0.5);
                return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
            };
            out[y * width + x] = {channel(&Rgb::r), channel(&Rgb::g), channel(&Rgb::b)};
        }
    }
    return RGBImage(width, height, std::move(out));
}

std::vector<std::uint8_t> to_raw_bitmap(const RGBImage& img) {
    std::vector<std::uint8_t> out;
    out.reserve(3 * img.width() * img.height());
    for (const Rgb& p : img.pixels()) {
        out.push_back(p.r);
        out.push_back(p.g);
        out.push_back(p.b);
    }
    return out;
}

namespace {

std::vector<std::uint8_t> write_png(std::size_t width, std::size_t height, png_uint_32 format,
                                    const void* buffer) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = format;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, buffer, 0, nullptr)) {
        throw Error(std::string("png encode: ") + image.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, buffer, 0, nullptr)) {
        throw Error(std::string("png encode: ") + image.message);
    }
    out.resize(size);
    return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const RGBImage& img) {
    const auto raw = to_raw_bitmap(img);
    return write_png(img.width(), img.height(), PNG_FORMAT_RGB, raw.data());
}

std::vector<std::uint8_t> encode_png_rgba(std::size_t width, std::size_t height,
                                          std::span<const std::uint8_t> rgba) {
    if (rgba.size() != 4 * width * height) throw InvalidDimensions("rgba buffer size mismatch");
    return write_png(width, height, PNG_FORMAT_RGBA, rgba.data());
}

}  // namespace covercx
