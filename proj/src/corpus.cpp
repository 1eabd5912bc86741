#include "covercx/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <unordered_map>

#include "covercx/csv.hpp"
#include "covercx/errors.hpp"
#include "covercx/text.hpp"

namespace covercx::corpus {

namespace {

constexpr std::array<Supergenre, kSupergenreCount> kSupergenres{
    Supergenre::Classical, Supergenre::CountryFolk, Supergenre::Electronic, Supergenre::HipHop,
    Supergenre::JazzBlues, Supergenre::Metal,       Supergenre::Pop,        Supergenre::RnB,
    Supergenre::Rock,      Supergenre::Speciality,  Supergenre::WorldMusic,
};

constexpr std::array<std::string_view, kSupergenreCount> kSupergenreNames{
    "Classical", "Country & Folk", "Electronic", "Hip Hop",    "Jazz & Blues", "Metal",
    "Pop",       "R&B",            "Rock",       "Speciality", "World Music",
};

std::string_view cell(const csv::Row& row, std::size_t col) {
    return col < row.size() ? std::string_view(row[col]) : std::string_view{};
}

std::size_t require_column(const csv::Table& t, std::initializer_list<std::string_view> names) {
    for (auto name : names) {
        if (auto c = t.column(name)) return *c;
    }
    throw SchemaError("missing required column \"" + std::string(*names.begin()) + "\"");
}

// Accepts "1999" and date forms such as "1999-05-01".
std::optional<int> parse_year(std::string_view s) {
    int year = 0;
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, year);
    if (res.ec != std::errc{}) return std::nullopt;
    if (res.ptr != end && *res.ptr != '-') return std::nullopt;
    return year;
}

}  // namespace

std::span<const Supergenre> all_supergenres() { return kSupergenres; }

std::string_view to_string(Supergenre g) { return kSupergenreNames[static_cast<std::size_t>(g)]; }

std::optional<Supergenre> parse_supergenre(std::string_view name) {
    const std::string key = text::normalize_key(name);
    for (std::size_t i = 0; i < kSupergenreCount; ++i) {
        if (text::normalize_key(kSupergenreNames[i]) == key) return kSupergenres[i];
    }
    return std::nullopt;
}

std::string_view to_string(Source s) {
    switch (s) {
        case Source::MuMu: return "MuMu";
        case Source::MsdI: return "MSD-I";
        case Source::Billboard: return "Billboard";
        case Source::Other: break;
    }
    return "Other";
}

Source parse_source(std::string_view s) {
    const std::string key = text::normalize_key(s);
    if (key == "mumu") return Source::MuMu;
    if (key == "msd-i" || key == "msdi" || key == "msd_i") return Source::MsdI;
    if (key == "billboard") return Source::Billboard;
    return Source::Other;
}

std::size_t SourcePriority::rank(Source s) const {
    const auto it = std::find(order.begin(), order.end(), s);
    return static_cast<std::size_t>(it - order.begin());
}

IngestResult ingest_metadata(std::istream& in) {
    const csv::Table table = csv::read(in);
    IngestResult result;
    if (table.header.empty()) return result;

    const std::size_t c_id = require_column(table, {"album_id"});
    const std::size_t c_artist = require_column(table, {"artist"});
    const std::size_t c_title = require_column(table, {"title"});
    const std::size_t c_year = require_column(table, {"year"});
    const std::size_t c_genres = require_column(table, {"raw_genres"});
    const std::size_t c_image = require_column(table, {"image_ref"});
    const std::size_t c_source = require_column(table, {"source"});

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = table.lines[r];
        ++result.report.rows_read;

        AlbumRecord rec;
        rec.album_id = text::trim(cell(row, c_id));
        if (rec.album_id.empty()) {
            result.report.row_errors.push_back({line, "empty album_id"});
            continue;
        }
        const std::string year = text::trim(cell(row, c_year));
        if (year.empty()) {
            ++result.report.dropped["missing_date"];
            continue;
        }
        const auto parsed = parse_year(year);
        if (!parsed) {
            result.report.row_errors.push_back({line, "invalid year \"" + year + "\""});
            continue;
        }
        rec.year = *parsed;
        rec.artist = cell(row, c_artist);
        rec.title = cell(row, c_title);
        for (auto& g : text::split(cell(row, c_genres), '|')) {
            auto label = text::trim(g);
            if (!label.empty()) rec.raw_genres.push_back(std::move(label));
        }
        rec.image_ref = text::trim(cell(row, c_image));
        rec.source = parse_source(cell(row, c_source));
        result.records.push_back(std::move(rec));
    }
    return result;
}

namespace {

template <typename KeyFn>
std::vector<AlbumRecord> keep_preferred(std::vector<AlbumRecord> records, const SourcePriority& priority,
                                        KeyFn key_of) {
    std::vector<AlbumRecord> kept;
    kept.reserve(records.size());
    std::unordered_map<std::string, std::size_t> slot;
    for (auto& rec : records) {
        auto [it, inserted] = slot.try_emplace(key_of(rec), kept.size());
        if (inserted) {
            kept.push_back(std::move(rec));
        } else if (priority.rank(rec.source) < priority.rank(kept[it->second].source)) {
            kept[it->second] = std::move(rec);
        }
    }
    return kept;
}

}  // namespace

std::vector<AlbumRecord> dedupe(std::vector<AlbumRecord> records, const SourcePriority& priority) {
    records = keep_preferred(std::move(records), priority,
                             [](const AlbumRecord& r) { return r.album_id; });
    records = keep_preferred(std::move(records), priority, [](const AlbumRecord& r) {
        // Unit separator keeps ("a b", "c") apart from ("a", "b c").
        return text::normalize_key(r.artist) + '\x1f' + text::normalize_key(r.title);
    });
    std::stable_sort(records.begin(), records.end(), [](const AlbumRecord& a, const AlbumRecord& b) {
        if (a.year != b.year) return a.year < b.year;
        return a.album_id < b.album_id;
    });
    return records;
}

void GenreMap::add(std::string_view raw_label, Entry entry) {
    entries_[text::normalize_key(raw_label)] = std::move(entry);
}

const GenreMap::Entry* GenreMap::lookup(std::string_view raw_label) const {
    const auto it = entries_.find(text::normalize_key(raw_label));
    return it == entries_.end() ? nullptr : &it->second;
}

GenreMap load_genre_map(std::istream& in) {
    const csv::Table table = csv::read(in);
    GenreMap gm;
    if (table.header.empty()) return gm;
    const std::size_t c_label = require_column(table, {"raw_label"});
    const std::size_t c_genres = require_column(table, {"supergenres"});
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string label = text::trim(cell(row, c_label));
        if (label.empty()) continue;
        const std::string value = text::trim(cell(row, c_genres));
        if (value == "DISCARD") {
            gm.add(label, std::nullopt);
            continue;
        }
        GenreSet set;
        for (const auto& name : text::split(value, '|')) {
            const std::string trimmed = text::trim(name);
            if (trimmed.empty()) continue;
            const auto g = parse_supergenre(trimmed);
            if (!g) {
                throw UnknownSupergenre("genre map line " + std::to_string(table.lines[r]) +
                                        ": unknown supergenre \"" + trimmed + "\"");
            }
            set.insert(*g);
        }
        if (set.empty()) {
            throw SchemaError("genre map line " + std::to_string(table.lines[r]) +
                              ": empty supergenre list for \"" + label + "\"");
        }
        gm.add(label, std::move(set));
    }
    return gm;
}

MappedRecords map_genres(std::vector<AlbumRecord> records, const GenreMap& gm) {
    MappedRecords out;
    for (auto& rec : records) {
        rec.supergenres.clear();
        for (const auto& label : rec.raw_genres) {
            const GenreMap::Entry* entry = gm.lookup(label);
            if (entry == nullptr) {
                ++out.report.unmapped_labels[label];
                continue;
            }
            if (*entry) rec.supergenres.insert((*entry)->begin(), (*entry)->end());
        }
        if (rec.supergenres.empty()) out.report.unlabeled.push_back(rec.album_id);
    }
    out.records = std::move(records);
    return out;
}

namespace {

// "Pop", "['Pop']" and "[\"Pop\"]" all name the same genre.
std::string strip_list_syntax(std::string_view s) {
    std::string v = text::trim(s);
    if (v.size() >= 2 && v.front() == '[' && v.back() == ']') v = text::trim(v.substr(1, v.size() - 2));
    if (v.size() >= 2 && (v.front() == '\'' || v.front() == '"') && v.back() == v.front()) {
        v = v.substr(1, v.size() - 2);
    }
    return v;
}

bool parse_bool(std::string_view s) {
    const std::string k = text::normalize_key(s);
    return k == "true" || k == "1" || k == "yes";
}

}  // namespace

std::vector<Imputation> load_imputation(std::istream& in) {
    const csv::Table table = csv::read(in);
    std::vector<Imputation> out;
    if (table.header.empty()) return out;
    const std::size_t c_id = require_column(table, {"album_id", "album_group_mbid"});
    const std::size_t c_genre = require_column(table, {"genre", "genres"});
    const std::size_t c_sure = require_column(table, {"sure"});
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string name = strip_list_syntax(cell(row, c_genre));
        const auto g = parse_supergenre(name);
        if (!g) {
            throw UnknownSupergenre("imputation line " + std::to_string(table.lines[r]) +
                                    ": unknown supergenre \"" + name + "\"");
        }
        out.push_back({text::trim(cell(row, c_id)), *g, parse_bool(cell(row, c_sure))});
    }
    return out;
}

std::vector<AlbumRecord> apply_imputation(std::vector<AlbumRecord> records,
                                          std::span<const Imputation> imputed) {
    std::unordered_map<std::string, GenreSet> sure;
    for (const auto& imp : imputed) {
        if (imp.sure) sure[imp.album_id].insert(imp.genre);
    }
    for (auto& rec : records) {
        if (!rec.supergenres.empty()) continue;
        if (const auto it = sure.find(rec.album_id); it != sure.end()) rec.supergenres = it->second;
    }
    return records;
}

std::vector<Period> bin_periods(const std::map<int, std::size_t>& year_counts, std::size_t threshold) {
    if (threshold == 0) throw ConfigError("period threshold must be at least 1");
    std::vector<Period> periods;
    Period open;
    bool has_open = false;
    for (const auto& [year, count] : year_counts) {
        if (count == 0) continue;
        if (!has_open) {
            open = {year, year, 0};
            has_open = true;
        }
        open.end_year = year;
        open.album_count += count;
        if (open.album_count >= threshold) {
            periods.push_back(open);
            has_open = false;
        }
    }
    if (has_open) periods.push_back(open);
    if (periods.empty()) throw EmptyCorpus("no albums to bin into periods");
    return periods;
}

std::vector<Period> bin_periods(std::span<const AlbumRecord> records, std::size_t threshold) {
    std::map<int, std::size_t> counts;
    for (const auto& r : records) ++counts[r.year];
    return bin_periods(counts, threshold);
}

std::optional<std::size_t> find_period(std::span<const Period> periods, int year) {
    const auto it = std::lower_bound(periods.begin(), periods.end(), year,
                                     [](const Period& p, int y) { return p.end_year < y; });
    if (it == periods.end() || year < it->start_year) return std::nullopt;
    return static_cast<std::size_t>(it - periods.begin());
}

std::vector<AggregateStats> aggregate(std::span<const Observation> observations,
                                      std::span<const Period> periods, bool group_by_genre,
                                      std::size_t min_genre_count) {
    // [period][genre slot]; slot kSupergenreCount holds the period total.
    std::vector<std::array<std::vector<double>, kSupergenreCount + 1>> groups(periods.size());
    for (const auto& obs : observations) {
        const auto p = find_period(periods, obs.year);
        if (!p) throw Error("year " + std::to_string(obs.year) + " lies outside every period");
        if (group_by_genre) {
            for (auto g : obs.genres) groups[*p][static_cast<std::size_t>(g)].push_back(obs.value);
        } else {
            groups[*p][kSupergenreCount].push_back(obs.value);
        }
    }

    std::vector<AggregateStats> out;
    for (std::size_t p = 0; p < periods.size(); ++p) {
        if (!group_by_genre) {
            const auto& values = groups[p][kSupergenreCount];
            if (values.empty()) continue;
            out.push_back({p, periods[p], std::nullopt, stats::describe(values)});
            continue;
        }
        for (auto g : kSupergenres) {
            const auto& values = groups[p][static_cast<std::size_t>(g)];
            if (values.empty() || values.size() < min_genre_count) continue;
            out.push_back({p, periods[p], g, stats::describe(values)});
        }
    }
    return out;
}

std::vector<TrajectoryPoint> trajectory(std::span<const ECObservation> observations,
                                        std::span<const Period> periods) {
    if (periods.empty()) return {};
    std::vector<std::vector<double>> hs(periods.size());
    std::vector<std::vector<double>> cs(periods.size());
    for (const auto& obs : observations) {
        const auto p = find_period(periods, obs.year);
        if (!p) throw Error("year " + std::to_string(obs.year) + " lies outside every period");
        hs[*p].push_back(obs.H);
        cs[*p].push_back(obs.C);
    }
    std::vector<TrajectoryPoint> out;
    for (std::size_t p = 0; p < periods.size(); ++p) {
        if (hs[p].empty()) continue;
        const auto h = stats::describe(hs[p]);
        const auto c = stats::describe(cs[p]);
        out.push_back({p, periods[p], h.n, h.mean, c.mean, h.standard_error, c.standard_error});
    }
    return out;
}

}  // namespace covercx::corpus
