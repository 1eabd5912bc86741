#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "covercx/mdl.hpp"

namespace covercx {

enum class RecordStatus { Ok, Skipped };

/// Per-image metric bundle, keyed by (image_hash, config_fingerprint).
/// Skipped records remember images that could not be decoded so that
/// reruns do not retry them.
struct ComplexityRecord {
    std::string image_hash;
    std::string config_fingerprint;
    RecordStatus status = RecordStatus::Ok;
    std::string error;  // set for Skipped
    std::size_t width = 0;
    std::size_t height = 0;
    std::optional<double> H;
    std::optional<double> C;
    std::optional<double> zipc;
    std::optional<double> mdlc_bits;
    std::vector<mdl::LevelResult> mdlc_levels;
    std::optional<std::size_t> object_count;
    std::optional<double> object_tau;
    std::string tool_version;

    friend bool operator==(const ComplexityRecord&, const ComplexityRecord&) = default;
};

/// Single-line JSON with keys in sorted order; stable for identical content.
std::string to_json_line(const ComplexityRecord& rec);

/// Throws ParseError (line 0) on malformed input.
ComplexityRecord from_json_line(const std::string& line);

using CacheKey = std::pair<std::string, std::string>;  // (image_hash, config_fingerprint)

// Append-only newline-delimited record file. Opening compacts it: lines
// that fail to parse (such as a line cut short by a crash) are dropped,
// the last record per key wins, and the file is rewritten sorted by key.
// Appends are serialised and flushed record by record.
class MetricCache {
public:
    enum class Mode { ReadWrite, ReadOnly };

    /// ReadOnly loads the records without compacting the file or allowing appends.
    explicit MetricCache(std::filesystem::path path, Mode mode = Mode::ReadWrite);

    MetricCache(const MetricCache&) = delete;
    MetricCache& operator=(const MetricCache&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }

    /// Number of unreadable lines discarded while opening.
    std::size_t discarded_lines() const noexcept { return discarded_; }

    bool contains(const std::string& image_hash, const std::string& fingerprint) const;
    std::optional<ComplexityRecord> find(const std::string& image_hash,
                                         const std::string& fingerprint) const;

    void append(const ComplexityRecord& rec);

    /// Rewrites the file with one record per key, sorted by key.
    void compact();

    /// Records for one fingerprint, sorted by image hash.
    std::vector<ComplexityRecord> records(const std::string& fingerprint) const;
    std::size_t size() const;

private:
    void load();
    void rewrite_locked();

    std::filesystem::path path_;
    Mode mode_;
    mutable std::mutex mutex_;
    std::map<CacheKey, ComplexityRecord> records_;
    std::ofstream out_;
    std::size_t discarded_ = 0;
};

}  // namespace covercx
