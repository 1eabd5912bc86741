#include "covercx/text.hpp"

#include <cctype>

#include <unicode/uchar.h>
#include <unicode/ustring.h>
#include <unicode/utypes.h>

namespace covercx::text {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string ascii_fold(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string casefold(std::string_view s) {
    if (s.empty()) return {};
    UErrorCode status = U_ZERO_ERROR;
    int32_t len16 = 0;
    u_strFromUTF8(nullptr, 0, &len16, s.data(), static_cast<int32_t>(s.size()), &status);
    if (status != U_BUFFER_OVERFLOW_ERROR && U_FAILURE(status)) return ascii_fold(s);
    std::u16string utf16(static_cast<std::size_t>(len16), u'\0');
    status = U_ZERO_ERROR;
    u_strFromUTF8(utf16.data(), len16, nullptr, s.data(), static_cast<int32_t>(s.size()), &status);
    if (U_FAILURE(status)) return ascii_fold(s);

    status = U_ZERO_ERROR;
    const int32_t folded_len =
        u_strFoldCase(nullptr, 0, utf16.data(), len16, U_FOLD_CASE_DEFAULT, &status);
    if (status != U_BUFFER_OVERFLOW_ERROR && U_FAILURE(status)) return ascii_fold(s);
    std::u16string folded(static_cast<std::size_t>(folded_len), u'\0');
    status = U_ZERO_ERROR;
    u_strFoldCase(folded.data(), folded_len, utf16.data(), len16, U_FOLD_CASE_DEFAULT, &status);
    if (U_FAILURE(status)) return ascii_fold(s);

    int32_t len8 = 0;
    status = U_ZERO_ERROR;
    u_strToUTF8(nullptr, 0, &len8, folded.data(), folded_len, &status);
    if (status != U_BUFFER_OVERFLOW_ERROR && U_FAILURE(status)) return ascii_fold(s);
    std::string out(static_cast<std::size_t>(len8), '\0');
    status = U_ZERO_ERROR;
    u_strToUTF8(out.data(), len8, nullptr, folded.data(), folded_len, &status);
    if (U_FAILURE(status)) return ascii_fold(s);
    return out;
}

std::string normalize_key(std::string_view s) {
    const std::string folded = casefold(s);
    std::string out;
    out.reserve(folded.size());
    bool pending_space = false;
    for (char c : folded) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace covercx::text
