#include <doctest.h>

#include "covercx/cache.hpp"
#include "covercx/config.hpp"
#include "covercx/csv.hpp"
#include "covercx/hash.hpp"
#include "support.hpp"

using namespace covercx;
using testsupport::run_cli;
using testsupport::TempDir;

namespace {

std::vector<std::string> write_images(const TempDir& dir, int n) {
    std::mt19937_64 rng(77);
    std::vector<std::string> paths;
    for (int i = 0; i < n; ++i) {
        const auto p = dir / ("c" + std::to_string(i) + ".png");
        testsupport::write_bytes(p, encode_png(testsupport::synthetic_cover(rng, 48, 40)));
        paths.push_back(p.string());
    }
    return paths;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("selftest and usage errors") {
    CHECK(run_cli({"selftest"}) == 0);
    CHECK(run_cli({}) != 0);
    CHECK(run_cli({"scan", "--no-such-flag"}) != 0);
    CHECK(run_cli({"--zip-level", "12", "scan"}) == 1);
}

TEST_CASE("scan, config file and command-line override") {
    TempDir dir;
    auto args = write_images(dir, 4);
    testsupport::write_text(dir / "run.conf",
                            "# covercx settings\n"
                            "metrics = ec,zipc\n"
                            "workers = 2\n"
                            "stride = 2\n");
    const auto cache = (dir / "cache.jsonl").string();

    std::vector<std::string> cmd{"--config", (dir / "run.conf").string(), "--cache", cache, "scan"};
    cmd.insert(cmd.end(), args.begin(), args.end());
    REQUIRE(run_cli(cmd, dir / "log1.txt") == 0);

    RunConfig expect;
    expect.compute_mdlc = false;
    expect.stride = 2;
    {
        MetricCache c(cache, MetricCache::Mode::ReadOnly);
        const auto recs = c.records(expect.fingerprint());
        REQUIRE(recs.size() == 4);
        CHECK(recs[0].zipc.has_value());
        CHECK_FALSE(recs[0].mdlc_bits.has_value());
    }

    // command line wins over the file
    std::vector<std::string> override_cmd{"--config", (dir / "run.conf").string(), "--stride", "1", "--cache", cache,
                                          "scan"};
    override_cmd.insert(override_cmd.end(), args.begin(), args.end());
    REQUIRE(run_cli(override_cmd) == 0);
    expect.stride = 1;
    MetricCache c(cache, MetricCache::Mode::ReadOnly);
    CHECK(c.records(expect.fingerprint()).size() == 4);
    CHECK(c.size() == 8);
}

TEST_CASE("strict promotes per-file errors to a failing exit code") {
    TempDir dir;
    auto args = write_images(dir, 3);
    testsupport::write_text(dir / "junk.jpg", "not an image");
    args.push_back((dir / "junk.jpg").string());
    std::vector<std::string> lenient{"--metrics", "ec", "--cache", (dir / "a.jsonl").string(), "scan"};
    lenient.insert(lenient.end(), args.begin(), args.end());
    CHECK(run_cli(lenient) == 0);
    std::vector<std::string> strict{"--metrics", "ec", "--strict", "--cache", (dir / "b.jsonl").string(), "scan"};
    strict.insert(strict.end(), args.begin(), args.end());
    CHECK(run_cli(strict) == 2);
}

TEST_CASE("ingest-detections") {
    TempDir dir;
    testsupport::write_text(dir / "det.jsonl",
                            "{\"image_id\":\"h1\",\"detections\":[{\"class\":\"person\",\"conf\":0.9},"
                            "{\"class\":\"dog\",\"conf\":0.2},{\"class\":\"person\",\"conf\":0.25}]}\n"
                            "{\"image_id\":\"h2\",\"detections\":[]}\n");
    REQUIRE(run_cli({"ingest-detections", "--detections", (dir / "det.jsonl").string(), "--out",
                     (dir / "sum.csv").string()}) == 0);
    const auto t = csv::read_file((dir / "sum.csv").string());
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == csv::Row{"h1", "2", "person:2"});
    CHECK(t.rows[1] == csv::Row{"h2", "0", ""});

    REQUIRE(run_cli({"--tau", "0.1", "ingest-detections", "--detections", (dir / "det.jsonl").string(), "--out",
                     (dir / "sum2.csv").string()}) == 0);
    CHECK(csv::read_file((dir / "sum2.csv").string()).rows[0][1] == "3");

    testsupport::write_text(dir / "bad.jsonl", "{\"image_id\":\"h1\",\"detections\":[{\"class\":\"dragon\",\"conf\":0.9}]}\n");
    CHECK(run_cli({"ingest-detections", "--detections", (dir / "bad.jsonl").string()}) == 1);
}

TEST_CASE("ingest-detections stores object counts in the cache") {
    TempDir dir;
    const auto images = write_images(dir, 2);
    const auto cache = (dir / "cache.jsonl").string();
    std::vector<std::string> scan_cmd{"--metrics", "ec", "--cache", cache, "scan"};
    scan_cmd.insert(scan_cmd.end(), images.begin(), images.end());
    REQUIRE(run_cli(scan_cmd) == 0);
    const auto h0 = sha256_hex(read_file_bytes(images[0]));
    testsupport::write_text(dir / "det.jsonl",
                            "{\"image_id\":\"" + h0 + "\",\"detections\":[{\"class\":\"cat\",\"conf\":0.9}]}\n");
    REQUIRE(run_cli({"--metrics", "ec", "--cache", cache, "ingest-detections", "--detections",
                     (dir / "det.jsonl").string(), "--update-cache", "--out", (dir / "s.csv").string()}) == 0);
    RunConfig cfg;
    cfg.compute_zipc = cfg.compute_mdlc = false;
    MetricCache c(cache, MetricCache::Mode::ReadOnly);
    const auto rec = c.find(h0, cfg.fingerprint());
    REQUIRE(rec.has_value());
    CHECK(rec->object_count == 1u);
    CHECK(rec->object_tau == 0.25);
}

TEST_CASE("report and aggregate end to end") {
    TempDir dir;
    const auto images = write_images(dir, 6);
    std::string meta = "album_id,artist,title,year,raw_genres,image_ref,source\n";
    for (int i = 0; i < 6; ++i) {
        meta += "a" + std::to_string(i) + ",artist" + std::to_string(i) + ",t," + std::to_string(1990 + i / 3) +
                "," + (i % 2 ? "rock" : "pop") + ",c" + std::to_string(i) + ".png,MuMu\n";
    }
    testsupport::write_text(dir / "albums.csv", meta);
    testsupport::write_text(dir / "genres.csv", "raw_label,supergenres\npop,Pop\nrock,Rock\n");
    const auto cache = (dir / "cache.jsonl").string();
    const std::vector<std::string> common{"--metrics", "ec,zipc", "--cache", cache, "--period-threshold", "3",
                                          "--min-genre-count", "1"};

    auto cmd = common;
    cmd.push_back("report");
    cmd.insert(cmd.end(), {"--metadata", (dir / "albums.csv").string(), "--genre-map", (dir / "genres.csv").string(),
                           "--out-dir", (dir / "out").string()});
    // not scanned yet
    CHECK(run_cli(cmd, dir / "log.txt") == 1);
    CHECK(testsupport::read_text(dir / "log.txt").find("no metrics") != std::string::npos);

    auto scan_cmd = common;
    scan_cmd.push_back("scan");
    scan_cmd.insert(scan_cmd.end(), images.begin(), images.end());
    REQUIRE(run_cli(scan_cmd) == 0);
    REQUIRE(run_cli(cmd, dir / "log.txt") == 0);
    const auto box = csv::read_file((dir / "out" / "boxplot_stats.csv").string());
    CHECK(box.rows.size() == 6);  // zipc only: 2 periods x (ALL + Pop + Rock)
    CHECK_FALSE(std::filesystem::exists(dir / "out" / "object_distribution.csv"));

    auto agg = common;
    for (const char* s : {"aggregate", "--metric", "zipc", "--by-genre"}) agg.push_back(s);
    agg.insert(agg.end(), {"--metadata", (dir / "albums.csv").string(), "--genre-map", (dir / "genres.csv").string(),
                           "--out", (dir / "agg.csv").string()});
    REQUIRE(run_cli(agg) == 0);
    const auto t = csv::read_file((dir / "agg.csv").string());
    CHECK(t.rows.size() == 4);
    CHECK(t.rows[0][0] == "zipc");
}

}
