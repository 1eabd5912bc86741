#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "covercx/corpus.hpp"
#include "covercx/mdl.hpp"

namespace covercx {

inline constexpr std::string_view kToolVersion = "covercx 1.0.0";

struct Size {
    std::size_t width = 0;
    std::size_t height = 0;

    friend bool operator==(const Size&, const Size&) = default;
};

/// "original" (nullopt) or "WxH".
using ResizePolicy = std::optional<Size>;

ResizePolicy parse_resize_policy(std::string_view s);
std::string to_string(const ResizePolicy& p);

struct RunConfig {
    // metric-affecting
    bool compute_ec = true;
    bool compute_zipc = true;
    bool compute_mdlc = true;
    std::size_t stride = 1;
    ResizePolicy ec_resize;
    ResizePolicy zipc_resize;
    std::size_t mdl_side = 224;
    std::size_t k_max = 5;
    std::vector<std::size_t> mdl_patch_sizes{4, 8, 16};
    std::size_t mdl_restarts = 5;
    bool mdl_grayscale = false;
    int zip_level = 9;
    std::uint64_t seed = 0;

    // analysis
    double tau = 0.25;
    std::size_t period_threshold = corpus::kDefaultPeriodThreshold;
    std::size_t min_genre_count = corpus::kDefaultMinGenreCount;
    bool count_repeated_classes = true;
    corpus::SourcePriority source_priority;
    std::vector<std::string> boxplot_metrics{"mdlc", "zipc"};

    // execution
    std::size_t workers = 0;  // 0: hardware concurrency
    bool strict = false;
    std::optional<std::filesystem::path> zip_debug_dir;  // dump each ZIPc archive as <hash>.zip

    mdl::MdlParams mdl_params() const;

    /// Canonical "key=value" lines of every metric-affecting field, sorted by key.
    std::string canonical_metric_fields() const;

    /// First 16 hex digits of the SHA-256 of canonical_metric_fields().
    std::string fingerprint() const;

    /// Throws ConfigError on out-of-range values.
    void validate() const;

    std::size_t effective_workers() const;
};

std::vector<std::size_t> parse_size_list(std::string_view s);

}  // namespace covercx
