#pragma once

// Helpers shared by the unit tests and the acceptance runner: fixture
// generators, temp directories, CLI invocation, and the reference oracles.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "covercx/image.hpp"

namespace testsupport {

namespace fs = std::filesystem;

#ifndef COVERCX_CLI_PATH
#define COVERCX_CLI_PATH "covercx"
#endif
#ifndef COVERCX_TEST_DATA
#define COVERCX_TEST_DATA "tests/data"
#endif

inline const fs::path kCli = COVERCX_CLI_PATH;
inline const fs::path kData = COVERCX_TEST_DATA;

class TempDir {
public:
    explicit TempDir(const std::string& tag = "covercx") {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

inline void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    return out + "'";
}

// Runs the CLI with stdout/stderr redirected to files; returns the exit code.
inline int run_cli(const std::vector<std::string>& args, const fs::path& log = "/dev/null") {
    std::string cmd = shell_quote(kCli.string());
    for (const auto& a : args) cmd += " " + shell_quote(a);
    cmd += " >" + shell_quote(log.string()) + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

// ---------------------------------------------------------------------------
// Fixtures

inline covercx::GrayImage random_gray(std::mt19937_64& rng, std::size_t w, std::size_t h,
                                      int max_value = 255) {
    std::uniform_int_distribution<int> dist(0, max_value);
    covercx::GrayImage img(w, h);
    for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(dist(rng));
    return img;
}

inline covercx::RGBImage random_rgb(std::mt19937_64& rng, std::size_t w, std::size_t h) {
    std::uniform_int_distribution<int> dist(0, 255);
    covercx::RGBImage img(w, h);
    for (auto& p : img.pixels()) {
        p = {static_cast<std::uint8_t>(dist(rng)), static_cast<std::uint8_t>(dist(rng)),
             static_cast<std::uint8_t>(dist(rng))};
    }
    return img;
}

// Smooth colour gradients with a few soft blobs; compresses like a poster
// rather than like noise.
inline covercx::RGBImage synthetic_cover(std::mt19937_64& rng, std::size_t w, std::size_t h) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double fx = 2.0 + 6.0 * u(rng), fy = 2.0 + 6.0 * u(rng), phase = 6.28 * u(rng);
    const double bx = u(rng) * w, by = u(rng) * h, br = (0.1 + 0.3 * u(rng)) * std::max(w, h);
    const int noise = static_cast<int>(u(rng) * 24);
    std::uniform_int_distribution<int> jitter(-noise, noise);
    covercx::RGBImage img(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double sx = static_cast<double>(x) / w, sy = static_cast<double>(y) / h;
            const double wave = 0.5 + 0.5 * std::sin(fx * sx + fy * sy + phase);
            const double d = std::hypot(x - bx, y - by) < br ? 1.0 : 0.0;
            auto clamp = [&](double v) {
                return static_cast<std::uint8_t>(std::clamp(static_cast<int>(v) + jitter(rng), 0, 255));
            };
            img.at(x, y) = {clamp(255 * wave * (1 - 0.6 * d)), clamp(180 * sy + 60 * d), clamp(255 * sx * wave)};
        }
    }
    return img;
}

// ---------------------------------------------------------------------------
// Entropy-complexity oracle: enumerate windows, rank by sorting
// (value, position) pairs, look the rank vector up in the list of all 24
// permutations, then evaluate entropy and the Jensen-Shannon divergence in
// its entropy-difference form.

inline std::vector<std::array<int, 4>> all_rank_vectors() {
    std::vector<std::array<int, 4>> perms;
    std::array<int, 4> p{0, 1, 2, 3};
    do {
        perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return perms;
}

inline int oracle_pattern(const std::array<int, 4>& v) {
    static const auto perms = all_rank_vectors();
    std::array<std::pair<int, int>, 4> order;
    for (int i = 0; i < 4; ++i) order[i] = {v[i], i};
    std::sort(order.begin(), order.end());
    std::array<int, 4> rank{};
    for (int r = 0; r < 4; ++r) rank[order[r].second] = r;
    return static_cast<int>(std::find(perms.begin(), perms.end(), rank) - perms.begin());
}

inline double shannon(const std::vector<double>& p) {
    double s = 0.0;
    for (double x : p) {
        if (x > 0) s -= x * std::log(x);
    }
    return s;
}

struct OracleEC {
    std::vector<double> counts;
    double H = 0.0;
    double C = 0.0;
};

inline OracleEC ec_oracle(const std::vector<int>& px, int w, int h) {
    OracleEC out;
    out.counts.assign(24, 0.0);
    for (int y = 0; y + 1 < h; ++y) {
        for (int x = 0; x + 1 < w; ++x) {
            const std::array<int, 4> v{px[y * w + x], px[y * w + x + 1], px[(y + 1) * w + x], px[(y + 1) * w + x + 1]};
            out.counts[oracle_pattern(v)] += 1.0;
        }
    }
    const double n = static_cast<double>((w - 1) * (h - 1));
    std::vector<double> p(24), m(24);
    for (int i = 0; i < 24; ++i) {
        p[i] = out.counts[i] / n;
        m[i] = 0.5 * (p[i] + 1.0 / 24.0);
    }
    const double ln24 = std::log(24.0);
    const double js = shannon(m) - 0.5 * shannon(p) - 0.5 * ln24;
    const double dmax = -0.5 * ((25.0 / 24.0) * std::log(25.0) - 2.0 * std::log(48.0) + ln24);
    out.H = shannon(p) / ln24;
    out.C = out.H * js / dmax;
    return out;
}

// Quantile oracle: explicit interpolation between the two order statistics
// around position (n - 1) q, after a full sort.
inline double oracle_quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace testsupport
