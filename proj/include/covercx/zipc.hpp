#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "covercx/image.hpp"

namespace covercx::zipc {

inline constexpr int kMaxLevel = 9;

/// Entry name written into the single-entry archive.
inline constexpr std::string_view kEntryName = "image.rgb";

// Fixed DOS timestamp (1980-01-01 00:00:00) so archives are reproducible.
inline constexpr std::uint16_t kDosTime = 0x0000;
inline constexpr std::uint16_t kDosDate = 0x0021;

struct ZipcScore {
    double ratio = 0.0;           // archive bytes / raw bitmap bytes
    std::size_t archive_bytes = 0;
    std::size_t raw_bytes = 0;
};

/// Raw DEFLATE stream (no zlib/gzip wrapper) at the given level.
std::vector<std::uint8_t> deflate_raw(std::span<const std::uint8_t> data, int level = kMaxLevel);

/// Single-entry ZIP archive holding `data` DEFLATE-compressed, with
/// fixed name and timestamp. Readable by any ZIP tool.
std::vector<std::uint8_t> zip_archive(std::span<const std::uint8_t> data, int level = kMaxLevel);

/// Incompressibility of the image's raw RGB24 bitmap. Values may exceed 1
/// when container overhead outweighs the compression gain.
ZipcScore zipc(const RGBImage& img, int level = kMaxLevel);

}  // namespace covercx::zipc
