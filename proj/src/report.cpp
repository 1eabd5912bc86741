#include "covercx/report.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include "covercx/csv.hpp"
#include "covercx/errors.hpp"
#include "covercx/hash.hpp"
#include "covercx/stats.hpp"

namespace covercx::report {

namespace {

using corpus::AggregateStats;
using corpus::Period;
using corpus::Supergenre;

constexpr std::string_view kAllGenres = "ALL";

std::ifstream open_input(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open " + p.string());
    return in;
}

std::string fmt(double v) { return csv::format_double(v); }

class HashResolver {
public:
    explicit HashResolver(std::filesystem::path root) : root_(std::move(root)) {}

    std::string resolve(const corpus::AlbumRecord& album) {
        if (looks_like_sha256(album.image_ref)) return album.image_ref;
        std::filesystem::path p(album.image_ref);
        if (p.is_relative()) p = root_ / p;
        const auto key = p.lexically_normal().string();
        if (const auto it = memo_.find(key); it != memo_.end()) return it->second;
        if (album.image_ref.empty() || !std::filesystem::is_regular_file(p)) {
            throw MissingMetrics("album " + album.album_id + ": image \"" + album.image_ref +
                                 "\" was never scanned (file not found)");
        }
        auto hash = sha256_hex(read_file_bytes(p));
        memo_.emplace(key, hash);
        return hash;
    }

private:
    std::filesystem::path root_;
    std::unordered_map<std::string, std::string> memo_;
};

std::vector<corpus::Observation> observations(const Corpus& c, std::string_view metric) {
    std::vector<corpus::Observation> obs;
    obs.reserve(c.entries.size());
    for (const auto& e : c.entries) {
        if (const auto v = metric_value(e, metric)) obs.push_back({e.album.year, e.album.supergenres, *v});
    }
    return obs;
}

// Period totals interleaved ahead of the genre rows of the same period.
std::vector<AggregateStats> totals_and_genres(const Corpus& c, std::string_view metric,
                                              std::size_t min_genre_count) {
    auto totals = aggregate_metric(c, metric, false, min_genre_count);
    auto genres = aggregate_metric(c, metric, true, min_genre_count);
    std::vector<AggregateStats> rows;
    rows.reserve(totals.size() + genres.size());
    std::merge(totals.begin(), totals.end(), genres.begin(), genres.end(), std::back_inserter(rows),
               [](const AggregateStats& a, const AggregateStats& b) { return a.period_index < b.period_index; });
    return rows;
}

std::string genre_label(const AggregateStats& s) {
    return s.genre ? std::string(corpus::to_string(*s.genre)) : std::string(kAllGenres);
}

std::ofstream open_output(const std::filesystem::path& path, Written& written) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    written.files.push_back(path);
    return out;
}

bool any_value(const Corpus& c, std::string_view metric) {
    return std::any_of(c.entries.begin(), c.entries.end(),
                       [&](const CorpusEntry& e) { return metric_value(e, metric).has_value(); });
}

}  // namespace

Corpus build_corpus(const Inputs& inputs, const RunConfig& cfg) {
    Corpus c;
    auto meta_in = open_input(inputs.metadata);
    auto ingested = corpus::ingest_metadata(meta_in);
    c.cleaning = std::move(ingested.report);

    const std::size_t ingested_count = ingested.records.size();
    auto records = corpus::dedupe(std::move(ingested.records), cfg.source_priority);
    if (records.size() < ingested_count) c.cleaning.dropped["duplicate"] += ingested_count - records.size();

    auto gm_in = open_input(inputs.genre_map);
    auto mapped = corpus::map_genres(std::move(records), corpus::load_genre_map(gm_in));
    c.genres = std::move(mapped.report);
    records = std::move(mapped.records);
    if (inputs.imputation) {
        auto imp_in = open_input(*inputs.imputation);
        const auto imputed = corpus::load_imputation(imp_in);
        records = corpus::apply_imputation(std::move(records), imputed);
    }

    std::unordered_map<std::string, detection::SemanticSummary> semantics;
    if (inputs.detections) {
        auto det_in = open_input(*inputs.detections);
        for (const auto& rec : detection::load_detections(det_in)) {
            semantics.emplace(rec.image_id, detection::summarize(rec, cfg.tau));
        }
        c.has_detections = true;
    }

    const std::string fingerprint = cfg.fingerprint();
    const bool have_albums = std::any_of(records.begin(), records.end(),
                                         [](const corpus::AlbumRecord& r) { return !r.supergenres.empty(); });
    std::optional<MetricCache> cache;
    if (have_albums) {
        if (!std::filesystem::exists(inputs.cache)) {
            throw MissingMetrics("no metrics: cache " + inputs.cache.string() + " does not exist, run scan first");
        }
        cache.emplace(inputs.cache, MetricCache::Mode::ReadOnly);
    }
    HashResolver resolver(inputs.image_root.value_or(inputs.metadata.parent_path()));

    for (auto& album : records) {
        if (album.supergenres.empty()) {
            ++c.cleaning.dropped["unlabeled"];
            continue;
        }
        const std::string hash = resolver.resolve(album);
        auto metrics = cache->find(hash, fingerprint);
        if (!metrics) {
            throw MissingMetrics("album " + album.album_id + ": image " + hash.substr(0, 12) +
                                 " has no metrics under config " + fingerprint);
        }
        if (metrics->status == RecordStatus::Skipped) {
            ++c.cleaning.dropped["corrupt_image"];
            continue;
        }
        CorpusEntry entry{std::move(album), std::move(*metrics), std::nullopt};
        if (c.has_detections) {
            if (const auto it = semantics.find(hash); it != semantics.end()) {
                entry.semantics = it->second;
            } else {
                ++c.cleaning.dropped["no_detection_record"];
            }
        }
        c.entries.push_back(std::move(entry));
    }

    if (!c.entries.empty()) {
        std::map<int, std::size_t> year_counts;
        for (const auto& e : c.entries) ++year_counts[e.album.year];
        c.periods = corpus::bin_periods(year_counts, cfg.period_threshold);
    }
    return c;
}

std::optional<double> metric_value(const CorpusEntry& e, std::string_view metric) {
    if (metric == "H") return e.metrics.H;
    if (metric == "C") return e.metrics.C;
    if (metric == "zipc") return e.metrics.zipc;
    if (metric == "mdlc") return e.metrics.mdlc_bits;
    if (metric == "objects") {
        if (e.semantics) return static_cast<double>(e.semantics->object_count);
        return std::nullopt;
    }
    throw ConfigError("unknown metric \"" + std::string(metric) + "\"");
}

std::vector<AggregateStats> aggregate_metric(const Corpus& c, std::string_view metric, bool group_by_genre,
                                             std::size_t min_genre_count) {
    const auto obs = observations(c, metric);
    return corpus::aggregate(obs, c.periods, group_by_genre, min_genre_count);
}

void write_aggregate_csv(std::ostream& out, std::string_view metric, const std::vector<AggregateStats>& rows) {
    csv::write_row(out, {"metric", "period", "start_year", "end_year", "genre", "n", "mean", "se", "median",
                         "q1", "q3", "iqr"});
    for (const auto& r : rows) {
        const auto& s = r.summary;
        csv::write_row(out, {std::string(metric), std::to_string(r.period_index),
                             std::to_string(r.period.start_year), std::to_string(r.period.end_year),
                             genre_label(r), std::to_string(s.n), fmt(s.mean), fmt(s.standard_error),
                             fmt(s.median), fmt(s.q1), fmt(s.q3), fmt(s.iqr)});
    }
}

Written write_report(const Corpus& c, const RunConfig& cfg, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    Written written;

    {
        auto out = open_output(out_dir / "ec_by_genre.csv", written);
        csv::write_row(out, {"genre", "n", "mean_H", "se_H", "mean_C", "se_C"});
        for (auto g : corpus::all_supergenres()) {
            std::vector<double> hs;
            std::vector<double> cs;
            for (const auto& e : c.entries) {
                if (!e.album.supergenres.count(g) || !e.metrics.H || !e.metrics.C) continue;
                hs.push_back(*e.metrics.H);
                cs.push_back(*e.metrics.C);
            }
            if (hs.empty() || hs.size() < cfg.min_genre_count) continue;
            const auto h = stats::describe(hs);
            const auto cc = stats::describe(cs);
            csv::write_row(out, {std::string(corpus::to_string(g)), std::to_string(h.n), fmt(h.mean),
                                 fmt(h.standard_error), fmt(cc.mean), fmt(cc.standard_error)});
        }
    }

    {
        auto out = open_output(out_dir / "ec_trajectory.csv", written);
        csv::write_row(out, {"period", "start_year", "end_year", "n", "mean_H", "se_H", "mean_C", "se_C"});
        std::vector<corpus::ECObservation> obs;
        for (const auto& e : c.entries) {
            if (e.metrics.H && e.metrics.C) obs.push_back({e.album.year, *e.metrics.H, *e.metrics.C});
        }
        for (const auto& p : corpus::trajectory(obs, c.periods)) {
            csv::write_row(out, {std::to_string(p.period_index), std::to_string(p.period.start_year),
                                 std::to_string(p.period.end_year), std::to_string(p.n), fmt(p.mean_H),
                                 fmt(p.se_H), fmt(p.mean_C), fmt(p.se_C)});
        }
    }

    {
        auto out = open_output(out_dir / "metric_over_time.csv", written);
        csv::write_row(out, {"metric", "period", "start_year", "end_year", "genre", "n", "mean", "se"});
        for (std::string_view metric : {"C", "H", "mdlc", "zipc"}) {
            if (!any_value(c, metric)) continue;
            for (const auto& r : totals_and_genres(c, metric, cfg.min_genre_count)) {
                csv::write_row(out, {std::string(metric), std::to_string(r.period_index),
                                     std::to_string(r.period.start_year), std::to_string(r.period.end_year),
                                     genre_label(r), std::to_string(r.summary.n), fmt(r.summary.mean),
                                     fmt(r.summary.standard_error)});
            }
        }
    }

    {
        auto out = open_output(out_dir / "boxplot_stats.csv", written);
        csv::write_row(out, {"metric", "period", "start_year", "end_year", "genre", "n", "median", "q1", "q3",
                             "iqr", "mean", "se"});
        auto metrics = cfg.boxplot_metrics;
        std::sort(metrics.begin(), metrics.end());
        metrics.erase(std::unique(metrics.begin(), metrics.end()), metrics.end());
        for (const auto& metric : metrics) {
            if (!any_value(c, metric)) continue;
            for (const auto& r : totals_and_genres(c, metric, cfg.min_genre_count)) {
                const auto& s = r.summary;
                csv::write_row(out, {metric, std::to_string(r.period_index), std::to_string(r.period.start_year),
                                     std::to_string(r.period.end_year), genre_label(r), std::to_string(s.n),
                                     fmt(s.median), fmt(s.q1), fmt(s.q3), fmt(s.iqr), fmt(s.mean),
                                     fmt(s.standard_error)});
            }
        }
    }

    if (!c.has_detections) return written;

    {
        auto out = open_output(out_dir / "object_distribution.csv", written);
        csv::write_row(out, {"genre", "albums", "class", "count", "proportion"});
        auto emit = [&](std::string_view label, const std::vector<const detection::SemanticSummary*>& group) {
            for (const auto& share : detection::class_distribution(group, cfg.count_repeated_classes)) {
                csv::write_row(out, {std::string(label), std::to_string(group.size()), share.class_name,
                                     std::to_string(share.count), fmt(share.proportion)});
            }
        };
        std::vector<const detection::SemanticSummary*> all;
        for (const auto& e : c.entries) {
            if (e.semantics) all.push_back(&*e.semantics);
        }
        emit(kAllGenres, all);
        for (auto g : corpus::all_supergenres()) {
            std::vector<const detection::SemanticSummary*> group;
            for (const auto& e : c.entries) {
                if (e.semantics && e.album.supergenres.count(g)) group.push_back(&*e.semantics);
            }
            if (group.empty() || group.size() < cfg.min_genre_count) continue;
            emit(corpus::to_string(g), group);
        }
    }

    {
        auto out = open_output(out_dir / "objects_over_time.csv", written);
        csv::write_row(out, {"period", "start_year", "end_year", "genre", "n", "mean_objects", "se_objects"});
        for (const auto& r : totals_and_genres(c, "objects", cfg.min_genre_count)) {
            csv::write_row(out, {std::to_string(r.period_index), std::to_string(r.period.start_year),
                                 std::to_string(r.period.end_year), genre_label(r), std::to_string(r.summary.n),
                                 fmt(r.summary.mean), fmt(r.summary.standard_error)});
        }
    }
    return written;
}

Written run_report(const Inputs& inputs, const RunConfig& cfg, const std::filesystem::path& out_dir) {
    cfg.validate();
    return write_report(build_corpus(inputs, cfg), cfg, out_dir);
}

}  // namespace covercx::report
