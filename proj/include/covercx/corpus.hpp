#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "covercx/stats.hpp"

namespace covercx::corpus {

// ---------------------------------------------------------------------------
// Genres

enum class Supergenre {
    Classical,
    CountryFolk,
    Electronic,
    HipHop,
    JazzBlues,
    Metal,
    Pop,
    RnB,
    Rock,
    Speciality,
    WorldMusic,
};

inline constexpr std::size_t kSupergenreCount = 11;

std::span<const Supergenre> all_supergenres();
std::string_view to_string(Supergenre g);

/// Case- and whitespace-insensitive match against the 11 canonical names
/// ("world music" and "World Music" both resolve).
std::optional<Supergenre> parse_supergenre(std::string_view name);

using GenreSet = std::set<Supergenre>;

// ---------------------------------------------------------------------------
// Records

enum class Source { MuMu, MsdI, Billboard, Other };

std::string_view to_string(Source s);
Source parse_source(std::string_view s);  // unknown names map to Other

/// Dedup preference, most preferred first. Sources missing from the list
/// rank after all listed ones.
struct SourcePriority {
    std::vector<Source> order{Source::MuMu, Source::MsdI, Source::Billboard, Source::Other};

    std::size_t rank(Source s) const;
};

struct AlbumRecord {
    std::string album_id;
    std::string artist;
    std::string title;
    int year = 0;
    std::vector<std::string> raw_genres;
    GenreSet supergenres;
    std::string image_ref;
    Source source = Source::Other;

    friend bool operator==(const AlbumRecord&, const AlbumRecord&) = default;
};

struct RowError {
    std::size_t line = 0;
    std::string message;
};

struct CleaningReport {
    std::size_t rows_read = 0;
    std::map<std::string, std::size_t> dropped;  // reason -> count, e.g. "missing_date"
    std::vector<RowError> row_errors;
};

struct IngestResult {
    std::vector<AlbumRecord> records;
    CleaningReport report;
};

/// Reads the metadata CSV (album_id, artist, title, year, raw_genres,
/// image_ref, source). raw_genres is '|'-separated. Rows without a year are
/// dropped and counted as "missing_date"; other bad rows become RowErrors.
/// Throws SchemaError when a required column is absent.
IngestResult ingest_metadata(std::istream& in);

/// Three passes: album_id collisions, then normalised (artist, title)
/// collisions, each keeping the record from the most preferred source
/// (first seen wins ties); the result is sorted by (year, album_id).
std::vector<AlbumRecord> dedupe(std::vector<AlbumRecord> records, const SourcePriority& priority = {});

// ---------------------------------------------------------------------------
// Genre mapping and imputation

class GenreMap {
public:
    /// nullopt marks a DISCARD entry.
    using Entry = std::optional<GenreSet>;

    void add(std::string_view raw_label, Entry entry);
    const Entry* lookup(std::string_view raw_label) const;
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::map<std::string, Entry, std::less<>> entries_;  // keyed by normalised label
};

/// CSV with header `raw_label,supergenres`; supergenres is a '|'-separated
/// list or the literal DISCARD. Throws UnknownSupergenre or SchemaError.
GenreMap load_genre_map(std::istream& in);

struct GenreMappingReport {
    std::map<std::string, std::size_t> unmapped_labels;  // raw label -> occurrences
    std::vector<std::string> unlabeled;                  // album ids with no supergenre
};

struct MappedRecords {
    std::vector<AlbumRecord> records;
    GenreMappingReport report;
};

MappedRecords map_genres(std::vector<AlbumRecord> records, const GenreMap& gm);

struct Imputation {
    std::string album_id;
    Supergenre genre = Supergenre::Pop;
    bool sure = false;
};

/// CSV `album_id,genre,sure`. The genre cell may also use the list form
/// "['Pop']". Throws UnknownSupergenre or SchemaError.
std::vector<Imputation> load_imputation(std::istream& in);

/// Fills empty supergenre sets from sure imputations only; records that
/// already carry supergenres are never modified.
std::vector<AlbumRecord> apply_imputation(std::vector<AlbumRecord> records,
                                          std::span<const Imputation> imputed);

// ---------------------------------------------------------------------------
// Periods and aggregation

struct Period {
    int start_year = 0;
    int end_year = 0;  // inclusive
    std::size_t album_count = 0;

    friend bool operator==(const Period&, const Period&) = default;
};

inline constexpr std::size_t kDefaultPeriodThreshold = 3000;
inline constexpr std::size_t kDefaultMinGenreCount = 50;

/// Accumulates whole years in ascending order until the running count
/// reaches `threshold`, then closes the period. The last period keeps the
/// remainder. Throws EmptyCorpus when there are no albums.
std::vector<Period> bin_periods(const std::map<int, std::size_t>& year_counts,
                                std::size_t threshold = kDefaultPeriodThreshold);
std::vector<Period> bin_periods(std::span<const AlbumRecord> records,
                                std::size_t threshold = kDefaultPeriodThreshold);

/// Index of the period containing `year`, if any.
std::optional<std::size_t> find_period(std::span<const Period> periods, int year);

struct Observation {
    int year = 0;
    GenreSet genres;
    double value = 0.0;
};

struct AggregateStats {
    std::size_t period_index = 0;
    Period period;
    std::optional<Supergenre> genre;  // nullopt: all albums of the period
    stats::Summary summary;
};

/// Per-period (or per period x genre) summaries. Genre groups smaller than
/// min_genre_count are omitted, empty groups always are. An album counts
/// once in each of its genres. Rows are ordered by period, then genre name.
std::vector<AggregateStats> aggregate(std::span<const Observation> observations,
                                      std::span<const Period> periods, bool group_by_genre,
                                      std::size_t min_genre_count = kDefaultMinGenreCount);

struct ECObservation {
    int year = 0;
    double H = 0.0;
    double C = 0.0;
};

struct TrajectoryPoint {
    std::size_t period_index = 0;
    Period period;
    std::size_t n = 0;
    double mean_H = 0.0;
    double mean_C = 0.0;
    double se_H = 0.0;
    double se_C = 0.0;
};

/// Mean entropy-complexity position per period, in chronological order.
std::vector<TrajectoryPoint> trajectory(std::span<const ECObservation> observations,
                                        std::span<const Period> periods);

}  // namespace covercx::corpus
