#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "covercx/image.hpp"

namespace covercx::mdl {

struct MdlParams {
    std::size_t side = 224;                        // images are resized to side x side
    std::vector<std::size_t> patch_sizes{4, 8, 16};
    std::size_t k_max = 5;
    std::size_t restarts = 5;
    std::size_t max_iterations = 100;
    double sigma_min = 1e-3;
    double delta = 1.0 / 256.0;                    // quantisation step of the residual code
    bool grayscale = false;                        // luminance features instead of RGB
    std::uint64_t seed = 0;
};

/// One row per non-overlapping p x p patch: per-channel mean followed by
/// per-channel standard deviation, each column standardised to zero mean
/// and unit variance within the level. Constant columns become zeros.
class PatchFeatures {
public:
    PatchFeatures(std::size_t level, std::size_t rows, std::size_t dims, std::vector<double> values);

    std::size_t level() const noexcept { return level_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t dims() const noexcept { return dims_; }

    std::span<const double> row(std::size_t i) const { return {values_.data() + i * dims_, dims_}; }
    std::span<const double> values() const noexcept { return values_; }

    /// Number of pairwise distinct rows (exact comparison).
    std::size_t distinct_rows() const;

private:
    std::size_t level_;
    std::size_t rows_;
    std::size_t dims_;
    std::vector<double> values_;
};

/// Throws InvalidPatchSize unless p divides both image dimensions.
PatchFeatures patch_features(const RGBImage& img, std::size_t p, bool grayscale = false);

struct KMeansFit {
    std::size_t k = 0;                 // non-empty clusters after dropping empties
    std::vector<std::size_t> labels;   // in [0, k)
    std::vector<double> centroids;     // k x dims, row-major
    std::vector<std::size_t> sizes;
    double inertia = 0.0;
};

/// Lloyd's algorithm with k-means++ seeding; best inertia over `restarts`
/// independent seedings. Deterministic for a given seed.
KMeansFit kmeans(const PatchFeatures& f, std::size_t k, std::size_t restarts,
                 std::uint64_t seed, std::size_t max_iterations = 100);

enum class DegeneratePolicy {
    Fallback,  // reduce K to the number of distinct rows
    Throw,     // raise DegenerateClustering
};

struct DescriptionLength {
    std::size_t k_requested = 0;
    std::size_t k = 0;  // clusters actually costed
    double model_bits = 0.0;
    double assignment_bits = 0.0;
    double residual_bits = 0.0;

    double total() const noexcept { return model_bits + assignment_bits + residual_bits; }
};

/// Two-part code length of the features under a K-cluster spherical
/// Gaussian model:
///   model      = ((K d + K - 1) / 2) log2 N
///   assignment = sum_i -log2(n_{z_i} / N)
///   residual   = sum_ij max(0, -log2(phi(x_ij; mu_{z_i j}, sigma_{z_i}) delta))
DescriptionLength description_length(const PatchFeatures& f, std::size_t k, const MdlParams& params,
                                     DegeneratePolicy policy = DegeneratePolicy::Fallback);

/// Parameter cost alone, the lower bound of any level's code length.
double model_cost(std::size_t k, std::size_t dims, std::size_t rows);

struct LevelResult {
    std::size_t patch_size = 0;
    std::size_t k = 0;
    double bits = 0.0;

    friend bool operator==(const LevelResult&, const LevelResult&) = default;
};

struct MDLcScore {
    double bits = 0.0;  // sum of per-level minima
    std::vector<LevelResult> per_level;
};

/// Resizes to side x side and sums, over patch levels, the minimum
/// description length over K = 1..k_max (ties go to the smaller K).
MDLcScore mdlc(const RGBImage& img, const MdlParams& params = {});

/// Per-level search on an image that is already side x side.
LevelResult best_level(const RGBImage& img, std::size_t patch_size, const MdlParams& params);

}  // namespace covercx::mdl
