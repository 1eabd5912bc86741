#include "covercx/config.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <thread>

#include "covercx/errors.hpp"
#include "covercx/hash.hpp"
#include "covercx/text.hpp"

namespace covercx {

namespace {

std::size_t parse_positive(std::string_view s, std::string_view what) {
    std::size_t v = 0;
    const std::string t = text::trim(s);
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size() || v == 0) {
        throw ConfigError("invalid " + std::string(what) + " \"" + t + "\"");
    }
    return v;
}

}  // namespace

ResizePolicy parse_resize_policy(std::string_view s) {
    const std::string t = text::normalize_key(s);
    if (t.empty() || t == "original" || t == "none") return std::nullopt;
    const auto x = t.find('x');
    if (x == std::string::npos) throw ConfigError("resize policy must be \"original\" or WxH");
    return Size{parse_positive(std::string_view(t).substr(0, x), "resize width"),
                parse_positive(std::string_view(t).substr(x + 1), "resize height")};
}

std::string to_string(const ResizePolicy& p) {
    if (!p) return "original";
    return std::to_string(p->width) + "x" + std::to_string(p->height);
}

std::vector<std::size_t> parse_size_list(std::string_view s) {
    std::vector<std::size_t> out;
    for (const auto& part : text::split(s, ',')) {
        if (text::trim(part).empty()) continue;
        out.push_back(parse_positive(part, "list entry"));
    }
    return out;
}

mdl::MdlParams RunConfig::mdl_params() const {
    mdl::MdlParams p;
    p.side = mdl_side;
    p.patch_sizes = mdl_patch_sizes;
    p.k_max = k_max;
    p.restarts = mdl_restarts;
    p.grayscale = mdl_grayscale;
    p.seed = seed;
    return p;
}

std::string RunConfig::canonical_metric_fields() const {
    std::map<std::string, std::string> kv;
    kv["metrics.ec"] = compute_ec ? "1" : "0";
    kv["metrics.zipc"] = compute_zipc ? "1" : "0";
    kv["metrics.mdlc"] = compute_mdlc ? "1" : "0";
    if (compute_ec) {
        kv["ec.stride"] = std::to_string(stride);
        kv["ec.resize"] = to_string(ec_resize);
    }
    if (compute_zipc) {
        kv["zipc.level"] = std::to_string(zip_level);
        kv["zipc.resize"] = to_string(zipc_resize);
    }
    if (compute_mdlc) {
        kv["mdl.side"] = std::to_string(mdl_side);
        kv["mdl.k_max"] = std::to_string(k_max);
        std::string sizes;
        for (auto p : mdl_patch_sizes) sizes += (sizes.empty() ? "" : ",") + std::to_string(p);
        kv["mdl.patch_sizes"] = sizes;
        kv["mdl.restarts"] = std::to_string(mdl_restarts);
        kv["mdl.grayscale"] = mdl_grayscale ? "1" : "0";
        kv["mdl.seed"] = std::to_string(seed);
    }
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

std::string RunConfig::fingerprint() const {
    return sha256_hex(canonical_metric_fields()).substr(0, 16);
}

void RunConfig::validate() const {
    if (stride == 0) throw ConfigError("stride must be positive");
    if (k_max == 0) throw ConfigError("k_max must be at least 1");
    if (mdl_restarts == 0) throw ConfigError("mdl restarts must be at least 1");
    if (mdl_side == 0) throw ConfigError("mdl side must be positive");
    if (mdl_patch_sizes.empty()) throw ConfigError("at least one mdl patch size is required");
    for (auto p : mdl_patch_sizes) {
        if (p == 0 || mdl_side % p != 0) {
            throw ConfigError("mdl patch size " + std::to_string(p) + " does not divide " +
                              std::to_string(mdl_side));
        }
    }
    if (zip_level < 0 || zip_level > 9) throw ConfigError("zip level must be in [0, 9]");
    if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must be in [0, 1]");
    if (period_threshold == 0) throw ConfigError("period threshold must be at least 1");
}

std::size_t RunConfig::effective_workers() const {
    if (workers > 0) return workers;
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace covercx
