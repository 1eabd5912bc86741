#include "covercx/scan.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "covercx/errors.hpp"
#include "covercx/hash.hpp"
#include "covercx/ordinal.hpp"
#include "covercx/text.hpp"
#include "covercx/zipc.hpp"

namespace covercx {

namespace {

// Runs fn on the image as-is or on its resized copy.
template <typename Fn>
auto with_resize(const RGBImage& img, const ResizePolicy& policy, Fn&& fn) {
    if (!policy) return fn(img);
    return fn(resize(img, policy->width, policy->height));
}

ComplexityRecord measure(std::span<const std::uint8_t> bytes, std::string hash, const RunConfig& cfg,
                         const std::string& fingerprint) {
    ComplexityRecord rec;
    try {
        const auto img = decode_image(bytes);
        rec = compute_metrics(img, cfg);
        if (cfg.zip_debug_dir && cfg.compute_zipc) {
            const auto archive = with_resize(img, cfg.zipc_resize, [&](const RGBImage& src) {
                return zipc::zip_archive(to_raw_bitmap(src), cfg.zip_level);
            });
            std::filesystem::create_directories(*cfg.zip_debug_dir);
            std::ofstream out(*cfg.zip_debug_dir / (hash + ".zip"), std::ios::binary | std::ios::trunc);
            out.write(reinterpret_cast<const char*>(archive.data()), static_cast<std::streamsize>(archive.size()));
        }
    } catch (const Error& e) {
        rec = {};
        rec.status = RecordStatus::Skipped;
        rec.error = e.what();
    }
    rec.image_hash = std::move(hash);
    rec.config_fingerprint = fingerprint;
    rec.tool_version = std::string(kToolVersion);
    return rec;
}

}  // namespace

ComplexityRecord compute_metrics(const RGBImage& img, const RunConfig& cfg) {
    ComplexityRecord rec;
    rec.width = img.width();
    rec.height = img.height();
    if (cfg.compute_ec) {
        const auto pt = with_resize(img, cfg.ec_resize, [&](const RGBImage& src) {
            return ordinal::ec_point(to_grayscale(src), cfg.stride);
        });
        rec.H = pt.H;
        rec.C = pt.C;
    }
    if (cfg.compute_zipc) {
        rec.zipc = with_resize(img, cfg.zipc_resize, [&](const RGBImage& src) {
            return zipc::zipc(src, cfg.zip_level).ratio;
        });
    }
    if (cfg.compute_mdlc) {
        auto score = mdl::mdlc(img, cfg.mdl_params());
        rec.mdlc_bits = score.bits;
        rec.mdlc_levels = std::move(score.per_level);
    }
    rec.tool_version = std::string(kToolVersion);
    rec.config_fingerprint = cfg.fingerprint();
    return rec;
}

ComplexityRecord compute_record(std::span<const std::uint8_t> bytes, const RunConfig& cfg) {
    return measure(bytes, sha256_hex(bytes), cfg, cfg.fingerprint());
}

ScanSummary scan(std::span<const std::filesystem::path> manifest, const RunConfig& cfg,
                 MetricCache& cache, const ScanHooks& hooks) {
    cfg.validate();
    const std::string fingerprint = cfg.fingerprint();

    ScanSummary summary;
    std::mutex mutex;  // guards summary, in_flight and errors
    std::unordered_set<std::string> in_flight;
    std::vector<std::pair<std::size_t, FileError>> errors;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};

    auto fail = [&](std::size_t index, std::string message) {
        std::lock_guard lock(mutex);
        errors.push_back({index, {manifest[index], std::move(message)}});
        if (cfg.strict) {
            summary.aborted = true;
            stop = true;
        }
    };

    auto worker = [&] {
        while (!stop) {
            if (hooks.should_stop && hooks.should_stop()) {
                stop = true;
                break;
            }
            const std::size_t i = next.fetch_add(1);
            if (i >= manifest.size()) break;

            std::vector<std::uint8_t> bytes;
            try {
                bytes = read_file_bytes(manifest[i]);
            } catch (const Error& e) {
                fail(i, e.what());
                continue;
            }
            std::string hash = sha256_hex(bytes);
            {
                std::lock_guard lock(mutex);
                if (cache.contains(hash, fingerprint) || !in_flight.insert(hash).second) {
                    ++summary.cached;
                    continue;
                }
            }
            const auto rec = measure(bytes, std::move(hash), cfg, fingerprint);
            cache.append(rec);
            if (hooks.on_record) hooks.on_record(rec);
            if (rec.status == RecordStatus::Skipped) {
                {
                    std::lock_guard lock(mutex);
                    ++summary.skipped;
                }
                fail(i, rec.error);
            } else {
                std::lock_guard lock(mutex);
                ++summary.computed;
            }
        }
    };

    const std::size_t n_workers = std::min(cfg.effective_workers(), std::max<std::size_t>(manifest.size(), 1));
    {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }
    cache.compact();

    std::sort(errors.begin(), errors.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [index, err] : errors) summary.errors.push_back(std::move(err));
    return summary;
}

std::vector<std::filesystem::path> read_manifest(const std::filesystem::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw Error("cannot open manifest " + manifest.string());
    const auto base = manifest.parent_path();
    std::vector<std::filesystem::path> out;
    std::string line;
    while (std::getline(in, line)) {
        const std::string entry = text::trim(line);
        if (entry.empty() || entry.front() == '#') continue;
        std::filesystem::path p(entry);
        out.push_back(p.is_relative() ? base / p : p);
    }
    return out;
}

}  // namespace covercx
