#include <doctest.h>

#include <numeric>
#include <sstream>

#include "covercx/corpus.hpp"
#include "covercx/errors.hpp"
#include "support.hpp"

using namespace covercx;
using namespace covercx::corpus;

namespace {

const std::string kHeader = "album_id,artist,title,year,raw_genres,image_ref,source\n";

IngestResult ingest(const std::string& body) {
    std::istringstream in(kHeader + body);
    return ingest_metadata(in);
}

AlbumRecord album(std::string id, std::string artist, std::string title, int year, Source src) {
    AlbumRecord r;
    r.album_id = std::move(id);
    r.artist = std::move(artist);
    r.title = std::move(title);
    r.year = year;
    r.source = src;
    return r;
}

GenreMap genre_map(const std::string& body) {
    std::istringstream in("raw_label,supergenres\n" + body);
    return load_genre_map(in);
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("ingest") {
    const auto r = ingest(
        "m1,Artist A,Title,1999,rock|indie rock,a.jpg,MuMu\n"
        "m2,B,\"Hello, World\",,pop,b.jpg,Billboard\n"
        "m3,C,T,2001-04-02,,c.jpg,MSD-I\n"
        "m4,D,T,sometime,jazz,d.jpg,other\n");
    REQUIRE(r.records.size() == 2);
    CHECK(r.records[0].raw_genres == std::vector<std::string>{"rock", "indie rock"});
    CHECK(r.records[0].source == Source::MuMu);
    CHECK(r.records[1].year == 2001);
    CHECK(r.records[1].source == Source::MsdI);
    CHECK(r.report.rows_read == 4);
    CHECK(r.report.dropped.at("missing_date") == 1);
    REQUIRE(r.report.row_errors.size() == 1);
    CHECK(r.report.row_errors[0].line == 5);

    const auto empty = ingest("");
    CHECK(empty.records.empty());
    CHECK(empty.report.dropped.empty());
    CHECK(empty.report.row_errors.empty());

    std::istringstream missing("album_id,artist,title,year,raw_genres,source\n");
    CHECK_THROWS_AS(ingest_metadata(missing), SchemaError);
}

TEST_CASE("dedupe keeps the preferred source") {
    const auto out = dedupe({album("x", "A", "T", 2000, Source::Billboard), album("x", "A2", "T2", 2000, Source::MuMu)});
    REQUIRE(out.size() == 1);
    CHECK(out[0].source == Source::MuMu);
    CHECK(out[0].artist == "A2");

    const auto norm = dedupe({album("1", "Artist", "Title", 1990, Source::MsdI),
                              album("2", "artist ", " title", 1990, Source::MuMu)});
    REQUIRE(norm.size() == 1);
    CHECK(norm[0].album_id == "2");

    // custom priority
    SourcePriority billboard_first{{Source::Billboard, Source::MuMu}};
    const auto alt = dedupe({album("x", "A", "T", 2000, Source::MuMu), album("x", "A", "T", 2000, Source::Billboard)},
                            billboard_first);
    CHECK(alt[0].source == Source::Billboard);
}

TEST_CASE("dedupe without collisions is a sorted permutation; dedupe is idempotent") {
    std::mt19937_64 rng(4);
    std::vector<AlbumRecord> recs;
    for (int i = 0; i < 300; ++i) {
        recs.push_back(album("id" + std::to_string(rng() % 200), "artist " + std::to_string(rng() % 40),
                             (rng() % 2 ? "T" : "t ") + std::to_string(rng() % 5), 1960 + static_cast<int>(rng() % 60),
                             static_cast<Source>(rng() % 4)));
    }
    const auto once = dedupe(recs);
    CHECK(dedupe(once) == once);
    CHECK(std::is_sorted(once.begin(), once.end(), [](const AlbumRecord& a, const AlbumRecord& b) {
        return std::tie(a.year, a.album_id) < std::tie(b.year, b.album_id);
    }));

    std::vector<AlbumRecord> unique;
    for (int i = 0; i < 50; ++i) unique.push_back(album("u" + std::to_string(i), "a" + std::to_string(i), "t", 2000 - i, Source::Other));
    auto out = dedupe(unique);
    CHECK(out.size() == unique.size());
    CHECK(std::is_permutation(out.begin(), out.end(), unique.begin()));
}

TEST_CASE("genre map and mapping") {
    const auto gm = genre_map(
        "death metal,Metal\n"
        "1990,DISCARD\n"
        "country rock,Country & Folk|Rock\n"
        "Hip-Hop,hip hop\n");
    CHECK(gm.size() == 4);

    std::vector<AlbumRecord> recs(4);
    recs[0].album_id = "a";
    recs[0].raw_genres = {"death metal"};
    recs[1].album_id = "b";
    recs[1].raw_genres = {"1990"};
    recs[2].album_id = "c";
    recs[2].raw_genres = {"Country  Rock", "acoustic"};
    recs[3].album_id = "d";
    recs[3].raw_genres = {"hip-hop", "1990"};
    const auto mapped = map_genres(recs, gm);
    CHECK(mapped.records[0].supergenres == GenreSet{Supergenre::Metal});
    CHECK(mapped.records[1].supergenres.empty());
    CHECK(mapped.records[2].supergenres == GenreSet{Supergenre::CountryFolk, Supergenre::Rock});
    CHECK(mapped.records[3].supergenres == GenreSet{Supergenre::HipHop});
    CHECK(mapped.report.unlabeled == std::vector<std::string>{"b"});
    CHECK(mapped.report.unmapped_labels == std::map<std::string, std::size_t>{{"acoustic", 1}});

    CHECK_THROWS_AS(genre_map("x,Polka\n"), UnknownSupergenre);
}

TEST_CASE("imputation") {
    std::istringstream in(
        "album_id,genre,sure\n"
        "u1,Pop,true\n"
        "u2,['Pop'],False\n"
        "r1,Pop,true\n");
    const auto imp = load_imputation(in);
    REQUIRE(imp.size() == 3);
    CHECK(imp[1].genre == Supergenre::Pop);
    CHECK_FALSE(imp[1].sure);

    std::vector<AlbumRecord> recs(3);
    recs[0].album_id = "u1";
    recs[1].album_id = "u2";
    recs[2].album_id = "r1";
    recs[2].supergenres = {Supergenre::Rock};
    const auto out = apply_imputation(recs, imp);
    CHECK(out[0].supergenres == GenreSet{Supergenre::Pop});
    CHECK(out[1].supergenres.empty());
    CHECK(out[2] == recs[2]);

    std::istringstream bad("album_id,genre,sure\nx,Polka,true\n");
    CHECK_THROWS_AS(load_imputation(bad), UnknownSupergenre);
}

TEST_CASE("period binning examples") {
    CHECK(bin_periods({{1950, 1000}, {1951, 1500}, {1952, 800}, {1953, 2900}}, 3000) ==
          std::vector<Period>{{1950, 1952, 3300}, {1953, 1953, 2900}});
    CHECK(bin_periods({{2000, 5000}}, 3000) == std::vector<Period>{{2000, 2000, 5000}});
    CHECK(bin_periods({{2000, 10}, {2001, 10}}, 3000) == std::vector<Period>{{2000, 2001, 20}});
    CHECK_THROWS_AS(bin_periods(std::map<int, std::size_t>{}, 3000), EmptyCorpus);
    CHECK_THROWS_AS(bin_periods({{2000, 1}}, 0), ConfigError);
}

TEST_CASE("period binning properties") {
    std::mt19937_64 rng(21);
    for (int iter = 0; iter < 100; ++iter) {
        std::map<int, std::size_t> counts;
        const int years = 1 + static_cast<int>(rng() % 60);
        const int start = 1940 + static_cast<int>(rng() % 20);
        for (int y = 0; y < years; ++y) {
            if (rng() % 7 == 0) continue;
            counts[start + y] = rng() % 2500;
        }
        std::size_t total = 0;
        for (auto& [y, c] : counts) total += c;
        if (total == 0) continue;
        const std::size_t threshold = 1 + rng() % 5000;
        const auto periods = bin_periods(counts, threshold);
        std::size_t sum = 0;
        for (std::size_t i = 0; i < periods.size(); ++i) {
            if (i + 1 < periods.size()) CHECK(periods[i].album_count >= threshold);
            if (i > 0) CHECK(periods[i].start_year > periods[i - 1].end_year);
            std::size_t inside = 0;
            for (auto& [y, c] : counts) {
                if (y >= periods[i].start_year && y <= periods[i].end_year) inside += c;
            }
            CHECK(inside == periods[i].album_count);
            sum += periods[i].album_count;
        }
        CHECK(sum == total);
        for (auto& [y, c] : counts) {
            if (c > 0) CHECK(find_period(periods, y).has_value());
        }
    }
}

TEST_CASE("aggregate") {
    const std::vector<Period> periods{{2000, 2000, 3}, {2001, 2001, 3}};
    std::vector<Observation> obs{
        {2000, {Supergenre::Pop}, 1.0},
        {2000, {Supergenre::Pop, Supergenre::Rock}, 2.0},
        {2000, {Supergenre::Rock}, 3.0},
        {2001, {Supergenre::Metal}, 10.0},
        {2001, {Supergenre::Metal}, 20.0},
        {2001, {Supergenre::Classical}, 30.0},
    };
    const auto totals = aggregate(obs, periods, false, 50);
    REQUIRE(totals.size() == 2);
    CHECK(totals[0].summary.n == 3);
    CHECK(totals[0].summary.mean == 2.0);
    CHECK(totals[0].summary.iqr == 1.0);
    CHECK_FALSE(totals[0].genre.has_value());

    const auto by_genre = aggregate(obs, periods, true, 1);
    REQUIRE(by_genre.size() == 4);
    CHECK(by_genre[0].genre == Supergenre::Pop);
    CHECK(by_genre[0].summary.n == 2);
    CHECK(by_genre[1].genre == Supergenre::Rock);
    CHECK(by_genre[2].genre == Supergenre::Classical);
    CHECK(by_genre[3].genre == Supergenre::Metal);

    CHECK(aggregate(obs, periods, true, 3).empty());
    CHECK(aggregate(obs, periods, true, 2).size() == 3);
}

TEST_CASE("genre groups below the minimum are omitted") {
    const std::vector<Period> periods{{1990, 1999, 99}};
    std::vector<Observation> obs;
    for (int i = 0; i < 49; ++i) obs.push_back({1995, {Supergenre::Pop}, 1.0 * i});
    for (int i = 0; i < 50; ++i) obs.push_back({1995, {Supergenre::Rock}, 1.0 * i});
    const auto rows = aggregate(obs, periods, true);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].genre == Supergenre::Rock);
    CHECK(rows[0].summary.n == 50);
}

TEST_CASE("group sizes without genres sum to the period count") {
    std::mt19937_64 rng(2);
    std::vector<AlbumRecord> recs;
    std::vector<Observation> obs;
    for (int i = 0; i < 5000; ++i) {
        const int year = 1950 + static_cast<int>(rng() % 70);
        recs.push_back(album(std::to_string(i), "", "", year, Source::Other));
        obs.push_back({year, {Supergenre::Pop}, static_cast<double>(rng() % 100)});
    }
    const auto periods = bin_periods(recs, 700);
    const auto rows = aggregate(obs, periods, false);
    REQUIRE(rows.size() == periods.size());
    for (const auto& r : rows) CHECK(r.summary.n == r.period.album_count);
}

TEST_CASE("trajectory") {
    const std::vector<Period> one{{2000, 2001, 2}};
    const std::vector<ECObservation> obs{{2000, 0.2, 0.1}, {2001, 0.4, 0.3}};
    const auto t = trajectory(obs, one);
    REQUIRE(t.size() == 1);
    CHECK(t[0].mean_H == doctest::Approx(0.3));
    CHECK(t[0].mean_C == doctest::Approx(0.2));
    CHECK(trajectory(obs, std::vector<Period>{}).empty());
}

TEST_CASE("supergenre names") {
    CHECK(all_supergenres().size() == 11);
    for (auto g : all_supergenres()) CHECK(parse_supergenre(to_string(g)) == g);
    CHECK(parse_supergenre("world music") == Supergenre::WorldMusic);
    CHECK(parse_supergenre("r&b") == Supergenre::RnB);
    CHECK_FALSE(parse_supergenre("Polka").has_value());
}

}
