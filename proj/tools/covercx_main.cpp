// covercx: batch front-end for the cover-complexity metrics and reports.
//
//   covercx scan --cache cache.jsonl --manifest images.txt
//   covercx ingest-detections --detections det.jsonl --cache cache.jsonl
//   covercx report --cache cache.jsonl --metadata albums.csv --genre-map genres.csv --out-dir out/
//   covercx aggregate --metric zipc --by-genre ... (same inputs as report)
//   covercx selftest
//
// Run-configuration flags are global and may also come from a key = value
// file given with --config; command-line values take precedence.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

#include "covercx/cache.hpp"
#include "covercx/config.hpp"
#include "covercx/corpus.hpp"
#include "covercx/csv.hpp"
#include "covercx/detection.hpp"
#include "covercx/errors.hpp"
#include "covercx/ordinal.hpp"
#include "covercx/report.hpp"
#include "covercx/scan.hpp"
#include "covercx/text.hpp"
#include "covercx/zipc.hpp"

namespace {

using namespace covercx;

struct GlobalOptions {
    RunConfig cfg;
    std::string cache = "covercx-cache.jsonl";
    std::vector<std::string> metrics{"ec", "zipc", "mdlc"};
    std::string ec_resize = "original";
    std::string zipc_resize = "original";
    std::vector<std::size_t> mdl_patches{4, 8, 16};
    std::vector<std::string> source_priority{"MuMu", "MSD-I", "Billboard", "Other"};
    std::vector<std::string> boxplot_metrics{"mdlc", "zipc"};
    bool quiet = false;

    void finalize() {
        cfg.compute_ec = cfg.compute_zipc = cfg.compute_mdlc = false;
        for (const auto& m : metrics) {
            const auto key = text::normalize_key(m);
            if (key == "ec") {
                cfg.compute_ec = true;
            } else if (key == "zipc") {
                cfg.compute_zipc = true;
            } else if (key == "mdlc") {
                cfg.compute_mdlc = true;
            } else if (!key.empty()) {
                throw ConfigError("unknown metric \"" + m + "\" (expected ec, zipc, mdlc)");
            }
        }
        cfg.ec_resize = parse_resize_policy(ec_resize);
        cfg.zipc_resize = parse_resize_policy(zipc_resize);
        cfg.mdl_patch_sizes = mdl_patches;
        cfg.source_priority.order.clear();
        for (const auto& s : source_priority) {
            if (!text::trim(s).empty()) cfg.source_priority.order.push_back(corpus::parse_source(s));
        }
        cfg.boxplot_metrics.clear();
        for (const auto& m : boxplot_metrics) {
            auto t = text::trim(m);
            if (t.empty()) continue;
            if (std::find(std::begin(report::kMetricNames), std::end(report::kMetricNames), t) ==
                std::end(report::kMetricNames)) {
                throw ConfigError("unknown boxplot metric \"" + t + "\"");
            }
            cfg.boxplot_metrics.push_back(std::move(t));
        }
        cfg.validate();
    }
};

struct ReportOptions {
    std::string metadata;
    std::string genre_map;
    std::string imputation;
    std::string detections;
    std::string image_root;

    void add_to(CLI::App* app) {
        app->add_option("--metadata", metadata, "Album metadata CSV")->required()->check(CLI::ExistingFile);
        app->add_option("--genre-map", genre_map, "raw_label,supergenres CSV")->required()->check(CLI::ExistingFile);
        app->add_option("--imputation", imputation, "album_id,genre,sure CSV")->check(CLI::ExistingFile);
        app->add_option("--detections", detections, "Detection records (JSON lines)")->check(CLI::ExistingFile);
        app->add_option("--image-root", image_root, "Base directory for relative image_ref paths");
    }

    report::Inputs inputs(const std::string& cache) const {
        report::Inputs in;
        in.metadata = metadata;
        in.genre_map = genre_map;
        if (!imputation.empty()) in.imputation = imputation;
        if (!detections.empty()) in.detections = detections;
        if (!image_root.empty()) in.image_root = image_root;
        in.cache = cache;
        return in;
    }
};

void log_cleaning(const report::Corpus& c) {
    std::cerr << "corpus: " << c.entries.size() << " albums in " << c.periods.size() << " periods\n";
    for (const auto& [reason, n] : c.cleaning.dropped) std::cerr << "  dropped " << reason << ": " << n << '\n';
    for (const auto& e : c.cleaning.row_errors) std::cerr << "  row error (line " << e.line << "): " << e.message << '\n';
    if (!c.genres.unmapped_labels.empty()) {
        std::cerr << "  unmapped genre labels: " << c.genres.unmapped_labels.size() << '\n';
        for (const auto& [label, n] : c.genres.unmapped_labels) std::cerr << "    " << label << " (" << n << ")\n";
    }
}

int run_scan(const GlobalOptions& g, const std::string& manifest, const std::vector<std::string>& files) {
    std::vector<std::filesystem::path> paths;
    if (!manifest.empty()) paths = read_manifest(manifest);
    for (const auto& f : files) paths.emplace_back(f);

    MetricCache cache(g.cache);
    if (cache.discarded_lines() > 0 && !g.quiet) {
        std::cerr << "cache: discarded " << cache.discarded_lines() << " unreadable line(s)\n";
    }
    const auto summary = scan(paths, g.cfg, cache);
    for (const auto& e : summary.errors) std::cerr << "skip " << e.path.string() << ": " << e.message << '\n';
    if (!g.quiet) {
        std::cerr << "scan: " << summary.computed << " computed, " << summary.cached << " cached, "
                  << summary.skipped << " skipped, " << summary.errors.size() << " error(s); config "
                  << g.cfg.fingerprint() << '\n';
    }
    if (g.cfg.strict && !summary.errors.empty()) return 2;
    return 0;
}

int run_ingest_detections(const GlobalOptions& g, const std::string& detections_path,
                          const std::string& out_path, bool update_cache) {
    std::ifstream in(detections_path, std::ios::binary);
    if (!in) throw Error("cannot open " + detections_path);
    const auto records = detection::load_detections(in);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary | std::ios::trunc);
        if (!file) throw Error("cannot write " + out_path);
        out = &file;
    }
    csv::write_row(*out, {"image_id", "object_count", "classes"});
    std::size_t with_objects = 0;
    for (const auto& rec : records) {
        const auto s = detection::summarize(rec, g.cfg.tau);
        std::string classes;
        for (const auto& [name, n] : s.classes) {
            classes += (classes.empty() ? "" : "|") + name + ":" + std::to_string(n);
        }
        if (s.object_count > 0) ++with_objects;
        csv::write_row(*out, {s.image_id, std::to_string(s.object_count), classes});
    }

    std::size_t updated = 0;
    if (update_cache) {
        MetricCache cache(g.cache);
        const auto fp = g.cfg.fingerprint();
        for (const auto& rec : records) {
            auto cached = cache.find(rec.image_id, fp);
            if (!cached || cached->status != RecordStatus::Ok) continue;
            const auto s = detection::summarize(rec, g.cfg.tau);
            cached->object_count = s.object_count;
            cached->object_tau = g.cfg.tau;
            cache.append(*cached);
            ++updated;
        }
        cache.compact();
    }
    if (!g.quiet) {
        std::cerr << "detections: " << records.size() << " images, " << with_objects
                  << " with objects at tau " << g.cfg.tau;
        if (update_cache) std::cerr << ", " << updated << " cache record(s) updated";
        std::cerr << '\n';
    }
    return 0;
}

int run_report(const GlobalOptions& g, const ReportOptions& r, const std::string& out_dir) {
    const auto corpus = report::build_corpus(r.inputs(g.cache), g.cfg);
    if (!g.quiet) log_cleaning(corpus);
    const auto written = report::write_report(corpus, g.cfg, out_dir);
    if (!g.quiet) {
        for (const auto& f : written.files) std::cerr << "wrote " << f.string() << '\n';
    }
    return 0;
}

int run_aggregate(const GlobalOptions& g, const ReportOptions& r, const std::string& metric, bool by_genre,
                  const std::string& out_path) {
    const auto corpus = report::build_corpus(r.inputs(g.cache), g.cfg);
    if (!g.quiet) log_cleaning(corpus);
    const auto rows = report::aggregate_metric(corpus, metric, by_genre, g.cfg.min_genre_count);
    if (out_path.empty()) {
        report::write_aggregate_csv(std::cout, metric, rows);
    } else {
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + out_path);
        report::write_aggregate_csv(out, metric, rows);
    }
    return 0;
}

int run_selftest() {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
        if (!ok) ++failures;
    };

    check("ordinal_pattern identity", ordinal::ordinal_pattern(1, 2, 3, 4) == 0);
    check("ordinal_pattern ties", ordinal::ordinal_pattern(5, 5, 5, 5) == 0);
    check("ordinal_pattern reversal", ordinal::ordinal_pattern(4, 3, 2, 1) == 23);

    const GrayImage flat(64, 64, 200);
    const auto flat_pt = ordinal::ec_point(flat);
    check("constant image H = C = 0", flat_pt.H == 0.0 && flat_pt.C == 0.0);

    std::mt19937_64 rng(7);
    GrayImage noise(256, 256);
    for (auto& v : noise.pixels()) v = static_cast<std::uint8_t>(rng() >> 56);
    const auto noise_pt = ordinal::ec_point(noise);
    check("noise H >= 0.99", noise_pt.H >= 0.99);
    check("noise C <= 0.05", noise_pt.C <= 0.05);

    check("zipc constant <= 0.05", zipc::zipc(RGBImage(256, 256, {30, 60, 90})).ratio <= 0.05);
    check("zipc 1x1 > 1", zipc::zipc(RGBImage(1, 1, {1, 2, 3})).ratio > 1.0);

    const auto periods = corpus::bin_periods(std::map<int, std::size_t>{{1950, 1000}, {1951, 1500}, {1952, 800}, {1953, 2900}});
    check("period binning", periods.size() == 2 && periods[0] == corpus::Period{1950, 1952, 3300} &&
                                periods[1] == corpus::Period{1953, 1953, 2900});

    std::cout << (failures == 0 ? "selftest passed" : "selftest FAILED") << '\n';
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Visual complexity metrics and corpus reports for album covers"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));
    app.set_config("--config", "", "Key = value configuration file");

    GlobalOptions g;
    RunConfig& cfg = g.cfg;
    app.add_option("--cache", g.cache, "Metric cache file (JSON lines)")->capture_default_str();
    app.add_option("--metrics", g.metrics, "Metrics to compute: ec,zipc,mdlc")->delimiter(',')->capture_default_str();
    app.add_option("--stride", cfg.stride, "Ordinal window stride")->capture_default_str();
    app.add_option("--ec-resize", g.ec_resize, "Resize before EC: original or WxH")->capture_default_str();
    app.add_option("--zipc-resize", g.zipc_resize, "Resize before ZIPc: original or WxH")->capture_default_str();
    app.add_option("--mdl-side", cfg.mdl_side, "MDLc working resolution")->capture_default_str();
    app.add_option("--k-max", cfg.k_max, "Largest cluster count in the MDL search")->capture_default_str();
    app.add_option("--mdl-patches", g.mdl_patches, "MDLc patch sizes")->delimiter(',')->capture_default_str();
    app.add_option("--mdl-restarts", cfg.mdl_restarts, "k-means restarts")->capture_default_str();
    app.add_flag("--mdl-gray", cfg.mdl_grayscale, "Luminance instead of RGB patch features");
    app.add_option("--zip-level", cfg.zip_level, "DEFLATE level")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Seed for k-means")->capture_default_str();
    app.add_option("--tau", cfg.tau, "Detection confidence threshold")->capture_default_str();
    app.add_option("--period-threshold", cfg.period_threshold, "Minimum albums per period")->capture_default_str();
    app.add_option("--min-genre-count", cfg.min_genre_count, "Minimum albums per genre group")->capture_default_str();
    app.add_option("--count-repeated-classes", cfg.count_repeated_classes,
                   "Count every instance of a class in the class distribution")->capture_default_str();
    app.add_option("--source-priority", g.source_priority, "Dedup source preference")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--boxplot-metrics", g.boxplot_metrics, "Metrics in boxplot_stats.csv")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--workers", cfg.workers, "Worker threads (0 = all cores)")->capture_default_str();
    app.add_flag("--strict", cfg.strict, "Treat per-file errors as fatal");
    app.add_flag("--quiet,-q", g.quiet, "Less logging");

    auto* scan_cmd = app.add_subcommand("scan", "Compute metrics for images not yet cached");
    scan_cmd->fallthrough();
    std::string manifest;
    std::vector<std::string> files;
    std::string zip_debug_dir;
    scan_cmd->add_option("--manifest", manifest, "File listing one image path per line")->check(CLI::ExistingFile);
    scan_cmd->add_option("files", files, "Image files");
    scan_cmd->add_option("--zip-debug-dir", zip_debug_dir, "Also write each ZIPc archive here");

    auto* det_cmd = app.add_subcommand("ingest-detections", "Validate detection records and summarise them");
    det_cmd->fallthrough();
    std::string detections_path;
    std::string det_out;
    bool update_cache = false;
    det_cmd->add_option("--detections", detections_path, "Detection records (JSON lines)")
        ->required()
        ->check(CLI::ExistingFile);
    det_cmd->add_option("--out", det_out, "Summary CSV (default stdout)");
    det_cmd->add_flag("--update-cache", update_cache, "Store object counts in matching cache records");

    auto* report_cmd = app.add_subcommand("report", "Write the report CSVs");
    report_cmd->fallthrough();
    ReportOptions report_opts;
    report_opts.add_to(report_cmd);
    std::string out_dir = "report";
    report_cmd->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();

    auto* agg_cmd = app.add_subcommand("aggregate", "Summary statistics of one metric per period");
    agg_cmd->fallthrough();
    ReportOptions agg_opts;
    agg_opts.add_to(agg_cmd);
    std::string metric = "C";
    bool by_genre = false;
    std::string agg_out;
    agg_cmd->add_option("--metric", metric, "H, C, zipc, mdlc or objects")
        ->check(CLI::IsMember({"H", "C", "zipc", "mdlc", "objects"}))
        ->capture_default_str();
    agg_cmd->add_flag("--by-genre", by_genre, "Group by period and genre");
    agg_cmd->add_option("--out", agg_out, "Output CSV (default stdout)");

    auto* selftest_cmd = app.add_subcommand("selftest", "Quick sanity checks of the metrics");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*selftest_cmd) return run_selftest();
        g.finalize();
        if (!zip_debug_dir.empty()) cfg.zip_debug_dir = zip_debug_dir;
        if (*scan_cmd) return run_scan(g, manifest, files);
        if (*det_cmd) return run_ingest_detections(g, detections_path, det_out, update_cache);
        if (*report_cmd) return run_report(g, report_opts, out_dir);
        if (*agg_cmd) return run_aggregate(g, agg_opts, metric, by_genre, agg_out);
    } catch (const covercx::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
