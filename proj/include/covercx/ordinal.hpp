#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "covercx/image.hpp"

namespace covercx::ordinal {

/// Number of ordinal patterns of a 2x2 window (4!).
inline constexpr std::size_t kPatternCount = 24;

struct OrdinalDistribution {
    std::array<std::uint64_t, kPatternCount> counts{};
    std::uint64_t total = 0;

    friend bool operator==(const OrdinalDistribution&, const OrdinalDistribution&) = default;
};

/// Point in the entropy-complexity plane. Both coordinates lie in [0, 1].
struct ECPoint {
    double H = 0.0;
    double C = 0.0;
};

/// Index of the ordinal pattern of a window read row-major as (a, b, c, d).
///
/// Each position gets its rank in the ascending order of values, with ties
/// resolved by position (the earlier position ranks lower). The 24 rank
/// vectors are numbered in lexicographic order, so the identity (0,1,2,3)
/// is pattern 0 and the full reversal (3,2,1,0) is pattern 23.
std::size_t ordinal_pattern(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d);

/// Counts patterns over all 2x2 windows whose top-left corner lies on the
/// stride grid. With stride 1 the windows overlap and
/// total = (width - 1) * (height - 1). Throws ImageTooSmall.
OrdinalDistribution pattern_distribution(const GrayImage& img, std::size_t stride = 1);

/// Normalised Shannon entropy of the pattern distribution, natural log.
double permutation_entropy(const OrdinalDistribution& dist);

/// Jensen-Shannon divergence between the pattern distribution and the
/// uniform distribution over 24 patterns (natural log).
double js_divergence_to_uniform(const OrdinalDistribution& dist);

/// Maximum of js_divergence_to_uniform over all distributions on 24 bins.
double max_js_divergence();

/// C = H * D_JS(P, U) / D_max.
double statistical_complexity(const OrdinalDistribution& dist);

ECPoint ec_point(const OrdinalDistribution& dist);
ECPoint ec_point(const GrayImage& img, std::size_t stride = 1);

}  // namespace covercx::ordinal
