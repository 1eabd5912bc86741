#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace covercx {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

/// True for a 64-character lowercase hex string.
bool looks_like_sha256(std::string_view s);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace covercx
