#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace covercx::text {

std::string trim(std::string_view s);

/// Unicode full case folding of a UTF-8 string. Invalid UTF-8 is folded
/// byte-wise for ASCII and passed through otherwise.
std::string casefold(std::string_view s);

/// Case-fold, trim, and collapse runs of whitespace to one space. This is
/// the key used to match artist/title pairs and raw genre labels.
std::string normalize_key(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace covercx::text
