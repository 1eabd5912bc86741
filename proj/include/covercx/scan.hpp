#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "covercx/cache.hpp"
#include "covercx/config.hpp"
#include "covercx/image.hpp"

namespace covercx {

/// All enabled metrics of one decoded image. Pure; safe to call concurrently.
ComplexityRecord compute_metrics(const RGBImage& img, const RunConfig& cfg);

/// Hash, decode and measure one encoded file. Undecodable content yields a
/// Skipped record rather than an exception.
ComplexityRecord compute_record(std::span<const std::uint8_t> bytes, const RunConfig& cfg);

struct FileError {
    std::filesystem::path path;
    std::string message;
};

struct ScanSummary {
    std::size_t computed = 0;  // new ok records
    std::size_t cached = 0;    // already present under the current fingerprint
    std::size_t skipped = 0;   // new skipped (corrupt) records
    std::vector<FileError> errors;  // unreadable or corrupt files, in manifest order
    bool aborted = false;      // strict mode stopped at the first error
};

struct ScanHooks {
    // Called from worker threads after each newly written record.
    std::function<void(const ComplexityRecord&)> on_record;
    // Polled between files; returning true stops the scan early.
    std::function<bool()> should_stop;
};

/// Measures every manifest entry not yet cached under cfg.fingerprint().
/// Workers write through the cache's serialised sink. Per-file failures
/// are collected; with cfg.strict the first one stops the batch.
ScanSummary scan(std::span<const std::filesystem::path> manifest, const RunConfig& cfg,
                 MetricCache& cache, const ScanHooks& hooks = {});

/// Reads a manifest file: one path per line, blank lines and '#' comments
/// ignored; relative paths resolve against the manifest's directory.
std::vector<std::filesystem::path> read_manifest(const std::filesystem::path& manifest);

}  // namespace covercx
