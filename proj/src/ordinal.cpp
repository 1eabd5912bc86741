#include "covercx/ordinal.hpp"

#include <cmath>
#include <string>

#include "covercx/errors.hpp"

namespace covercx::ordinal {

namespace {

// Lexicographic index of a rank vector via its Lehmer code.
constexpr std::size_t rank_vector_index(const std::array<int, 4>& rank) {
    constexpr std::array<std::size_t, 4> factorial{6, 2, 1, 0};
    std::size_t index = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        std::size_t smaller_after = 0;
        for (std::size_t j = i + 1; j < 4; ++j) {
            if (rank[j] < rank[i]) ++smaller_after;
        }
        index += smaller_after * factorial[i];
    }
    return index;
}

// Pair bits, one per (i, j) with i < j, in the order (0,1) (0,2) (0,3)
// (1,2) (1,3) (2,3). A bit is set when v[i] > v[j], i.e. when j ranks
// below i. The six bits fully determine the rank vector under the
// position tie-break.
constexpr std::array<std::array<int, 2>, 6> kPairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

constexpr std::array<std::uint8_t, 64> build_mask_table() {
    std::array<std::uint8_t, 64> table{};
    for (unsigned mask = 0; mask < 64; ++mask) {
        std::array<int, 4> rank{0, 0, 0, 0};
        for (std::size_t p = 0; p < kPairs.size(); ++p) {
            const auto [i, j] = kPairs[p];
            if (mask & (1u << p)) {
                ++rank[i];
            } else {
                ++rank[j];
            }
        }
        // Inconsistent (cyclic) masks never occur for real values.
        table[mask] = static_cast<std::uint8_t>(rank_vector_index(rank));
    }
    return table;
}

constexpr auto kMaskTable = build_mask_table();

inline std::size_t pattern_of(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
    const unsigned mask = unsigned{a > b} | unsigned{a > c} << 1 | unsigned{a > d} << 2 |
                          unsigned{b > c} << 3 | unsigned{b > d} << 4 | unsigned{c > d} << 5;
    return kMaskTable[mask];
}

constexpr double kPatterns = static_cast<double>(kPatternCount);

}  // namespace

std::size_t ordinal_pattern(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
    return pattern_of(a, b, c, d);
}

OrdinalDistribution pattern_distribution(const GrayImage& img, std::size_t stride) {
    if (img.width() < 2 || img.height() < 2) {
        throw ImageTooSmall("ordinal patterns need at least 2x2 pixels, got " +
                            std::to_string(img.width()) + "x" + std::to_string(img.height()));
    }
    if (stride == 0) throw ConfigError("window stride must be positive");

    OrdinalDistribution dist;
    const std::size_t w = img.width();
    const auto px = img.pixels();
    for (std::size_t y = 0; y + 1 < img.height(); y += stride) {
        const std::uint8_t* top = px.data() + y * w;
        const std::uint8_t* bottom = top + w;
        for (std::size_t x = 0; x + 1 < w; x += stride) {
            ++dist.counts[pattern_of(top[x], top[x + 1], bottom[x], bottom[x + 1])];
        }
    }
    for (auto c : dist.counts) dist.total += c;
    return dist;
}

double permutation_entropy(const OrdinalDistribution& dist) {
    if (dist.total == 0) return 0.0;
    const double total = static_cast<double>(dist.total);
    double s = 0.0;
    for (auto c : dist.counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        s -= p * std::log(p);
    }
    return s / std::log(kPatterns);
}

double js_divergence_to_uniform(const OrdinalDistribution& dist) {
    if (dist.total == 0) return 0.0;
    // Written as the mean of the two KL terms against the midpoint M so
    // that every bin with p == u contributes exactly zero.
    const double total = static_cast<double>(dist.total);
    const double u = 1.0 / kPatterns;
    double d = 0.0;
    for (auto c : dist.counts) {
        const double p = static_cast<double>(c) / total;
        const double m = 0.5 * (p + u);
        if (p > 0.0) d += p * std::log(p / m);
        d += u * std::log(u / m);
    }
    return 0.5 * d;
}

double max_js_divergence() {
    static const double value = -0.5 * ((kPatterns + 1.0) / kPatterns * std::log(kPatterns + 1.0) -
                                        2.0 * std::log(2.0 * kPatterns) + std::log(kPatterns));
    return value;
}

double statistical_complexity(const OrdinalDistribution& dist) {
    return ec_point(dist).C;
}

ECPoint ec_point(const OrdinalDistribution& dist) {
    ECPoint pt;
    pt.H = permutation_entropy(dist);
    if (pt.H == 0.0) return pt;
    const double q = js_divergence_to_uniform(dist) / max_js_divergence();
    pt.C = pt.H * q;
    // Rounding can push either coordinate a few ulps outside the unit interval.
    if (pt.H > 1.0) pt.H = 1.0;
    if (pt.C < 0.0) pt.C = 0.0;
    if (pt.C > 1.0) pt.C = 1.0;
    return pt;
}

ECPoint ec_point(const GrayImage& img, std::size_t stride) {
    return ec_point(pattern_distribution(img, stride));
}

}  // namespace covercx::ordinal
