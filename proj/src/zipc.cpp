#include "covercx/zipc.hpp"

#include <limits>
#include <string>

#include <zlib.h>

#include "covercx/errors.hpp"

namespace covercx::zipc {

namespace {

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

constexpr std::uint16_t kVersion = 20;
constexpr std::uint16_t kMethodDeflate = 8;

}  // namespace

std::vector<std::uint8_t> deflate_raw(std::span<const std::uint8_t> data, int level) {
    if (level < 0 || level > 9) throw ConfigError("deflate level must be in [0, 9]");
    z_stream zs{};
    if (deflateInit2(&zs, level, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw Error("deflateInit2 failed");
    }
    std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(data.size())));
    zs.next_in = const_cast<Bytef*>(data.data());
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&zs, Z_FINISH);
    const auto produced = zs.total_out;
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw Error("deflate did not finish: " + std::to_string(rc));
    out.resize(produced);
    return out;
}

std::vector<std::uint8_t> zip_archive(std::span<const std::uint8_t> data, int level) {
    if (data.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw Error("bitmap too large for a non-ZIP64 archive");
    }
    const auto compressed = deflate_raw(data, level);
    const auto crc = static_cast<std::uint32_t>(
        crc32(crc32(0L, Z_NULL, 0), data.data(), static_cast<uInt>(data.size())));
    const auto csize = static_cast<std::uint32_t>(compressed.size());
    const auto usize = static_cast<std::uint32_t>(data.size());
    const auto name_len = static_cast<std::uint16_t>(kEntryName.size());

    std::vector<std::uint8_t> out;
    out.reserve(compressed.size() + 98 + 2 * kEntryName.size());

    // local file header
    put32(out, 0x04034b50);
    put16(out, kVersion);
    put16(out, 0);  // flags
    put16(out, kMethodDeflate);
    put16(out, kDosTime);
    put16(out, kDosDate);
    put32(out, crc);
    put32(out, csize);
    put32(out, usize);
    put16(out, name_len);
    put16(out, 0);  // extra
    out.insert(out.end(), kEntryName.begin(), kEntryName.end());
    out.insert(out.end(), compressed.begin(), compressed.end());

    // central directory
    const auto cd_offset = static_cast<std::uint32_t>(out.size());
    put32(out, 0x02014b50);
    put16(out, kVersion);  // made by
    put16(out, kVersion);  // needed
    put16(out, 0);
    put16(out, kMethodDeflate);
    put16(out, kDosTime);
    put16(out, kDosDate);
    put32(out, crc);
    put32(out, csize);
    put32(out, usize);
    put16(out, name_len);
    put16(out, 0);  // extra
    put16(out, 0);  // comment
    put16(out, 0);  // disk start
    put16(out, 0);  // internal attributes
    put32(out, 0);  // external attributes
    put32(out, 0);  // local header offset
    out.insert(out.end(), kEntryName.begin(), kEntryName.end());
    const auto cd_size = static_cast<std::uint32_t>(out.size()) - cd_offset;

    // end of central directory
    put32(out, 0x06054b50);
    put16(out, 0);
    put16(out, 0);
    put16(out, 1);
    put16(out, 1);
    put32(out, cd_size);
    put32(out, cd_offset);
    put16(out, 0);
    return out;
}

ZipcScore zipc(const RGBImage& img, int level) {
    if (img.empty()) throw InvalidDimensions("zipc needs a non-empty image");
    const auto raw = to_raw_bitmap(img);
    const auto archive = zip_archive(raw, level);
    ZipcScore score;
    score.raw_bytes = raw.size();
    score.archive_bytes = archive.size();
    score.ratio = static_cast<double>(archive.size()) / static_cast<double>(raw.size());
    return score;
}

}  // namespace covercx::zipc
