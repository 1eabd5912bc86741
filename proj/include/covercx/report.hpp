#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "covercx/cache.hpp"
#include "covercx/config.hpp"
#include "covercx/corpus.hpp"
#include "covercx/detection.hpp"

namespace covercx::report {

/// Metric names accepted by aggregate() and the report outputs.
inline constexpr std::string_view kMetricNames[] = {"H", "C", "zipc", "mdlc", "objects"};

struct Inputs {
    std::filesystem::path metadata;
    std::filesystem::path genre_map;
    std::optional<std::filesystem::path> imputation;
    std::optional<std::filesystem::path> detections;
    std::filesystem::path cache;
    /// Base for relative image_ref paths; defaults to the metadata directory.
    std::optional<std::filesystem::path> image_root;
};

struct CorpusEntry {
    corpus::AlbumRecord album;
    ComplexityRecord metrics;
    std::optional<detection::SemanticSummary> semantics;
};

struct Corpus {
    std::vector<CorpusEntry> entries;  // ordered by (year, album_id)
    std::vector<corpus::Period> periods;
    corpus::CleaningReport cleaning;
    corpus::GenreMappingReport genres;
    bool has_detections = false;
};

/// Ingest, dedupe, map genres, impute, join with cached metrics and
/// detections, and bin periods. Albums without any supergenre and albums
/// whose image was skipped as corrupt are dropped and counted in the
/// cleaning report. Throws MissingMetrics when an album's image has no
/// cache record under the current fingerprint.
Corpus build_corpus(const Inputs& inputs, const RunConfig& cfg);

/// Value of a named metric for one entry, if available.
std::optional<double> metric_value(const CorpusEntry& e, std::string_view metric);

/// Summaries of one metric per period (and per genre when requested).
std::vector<corpus::AggregateStats> aggregate_metric(const Corpus& c, std::string_view metric,
                                                     bool group_by_genre, std::size_t min_genre_count);

/// The output files, in write order.
inline constexpr std::string_view kOutputFiles[] = {
    "ec_by_genre.csv",    "ec_trajectory.csv",     "metric_over_time.csv",
    "boxplot_stats.csv",  "object_distribution.csv", "objects_over_time.csv",
};

struct Written {
    std::vector<std::filesystem::path> files;
};

/// Writes the report CSVs into out_dir. Object files are written only when
/// the corpus carries detections.
Written write_report(const Corpus& c, const RunConfig& cfg, const std::filesystem::path& out_dir);

/// build_corpus + write_report. An empty corpus yields header-only files.
Written run_report(const Inputs& inputs, const RunConfig& cfg, const std::filesystem::path& out_dir);

/// CSV of aggregate_metric rows, as printed by the aggregate subcommand.
void write_aggregate_csv(std::ostream& out, std::string_view metric,
                         const std::vector<corpus::AggregateStats>& rows);

}  // namespace covercx::report
