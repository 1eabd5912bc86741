#include "covercx/cache.hpp"

#include <json.hpp>

#include "covercx/errors.hpp"

namespace covercx {

namespace {

using json = nlohmann::json;

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<T>();
}

}  // namespace

std::string to_json_line(const ComplexityRecord& rec) {
    json j;
    j["image_hash"] = rec.image_hash;
    j["config_fingerprint"] = rec.config_fingerprint;
    j["status"] = rec.status == RecordStatus::Ok ? "ok" : "skipped";
    if (!rec.error.empty()) j["error"] = rec.error;
    j["width"] = rec.width;
    j["height"] = rec.height;
    put_optional(j, "H", rec.H);
    put_optional(j, "C", rec.C);
    put_optional(j, "zipc", rec.zipc);
    put_optional(j, "mdlc_bits", rec.mdlc_bits);
    if (!rec.mdlc_levels.empty()) {
        json levels = json::array();
        for (const auto& l : rec.mdlc_levels) {
            levels.push_back({{"patch", l.patch_size}, {"k", l.k}, {"bits", l.bits}});
        }
        j["mdlc_levels"] = std::move(levels);
    }
    put_optional(j, "object_count", rec.object_count);
    put_optional(j, "object_tau", rec.object_tau);
    j["tool_version"] = rec.tool_version;
    return j.dump();
}

ComplexityRecord from_json_line(const std::string& line) {
    try {
        const json j = json::parse(line);
        ComplexityRecord rec;
        rec.image_hash = j.at("image_hash").get<std::string>();
        rec.config_fingerprint = j.at("config_fingerprint").get<std::string>();
        const auto status = j.at("status").get<std::string>();
        if (status == "ok") {
            rec.status = RecordStatus::Ok;
        } else if (status == "skipped") {
            rec.status = RecordStatus::Skipped;
        } else {
            throw ParseError(0, "unknown status \"" + status + "\"");
        }
        rec.error = j.value("error", std::string{});
        rec.width = j.value("width", std::size_t{0});
        rec.height = j.value("height", std::size_t{0});
        rec.H = get_optional<double>(j, "H");
        rec.C = get_optional<double>(j, "C");
        rec.zipc = get_optional<double>(j, "zipc");
        rec.mdlc_bits = get_optional<double>(j, "mdlc_bits");
        if (j.contains("mdlc_levels")) {
            for (const auto& l : j["mdlc_levels"]) {
                rec.mdlc_levels.push_back({l.at("patch").get<std::size_t>(), l.at("k").get<std::size_t>(),
                                           l.at("bits").get<double>()});
            }
        }
        rec.object_count = get_optional<std::size_t>(j, "object_count");
        rec.object_tau = get_optional<double>(j, "object_tau");
        rec.tool_version = j.value("tool_version", std::string{});
        return rec;
    } catch (const json::exception& e) {
        throw ParseError(0, e.what());
    }
}

MetricCache::MetricCache(std::filesystem::path path, Mode mode) : path_(std::move(path)), mode_(mode) {
    load();
}

void MetricCache::load() {
    std::lock_guard lock(mutex_);
    if (std::filesystem::exists(path_)) {
        std::ifstream in(path_, std::ios::binary);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                auto rec = from_json_line(line);
                CacheKey key{rec.image_hash, rec.config_fingerprint};
                records_.insert_or_assign(std::move(key), std::move(rec));
            } catch (const ParseError&) {
                ++discarded_;
            }
        }
    } else if (mode_ == Mode::ReadOnly) {
        throw Error("metric cache " + path_.string() + " does not exist");
    }
    if (mode_ == Mode::ReadWrite) rewrite_locked();
}

void MetricCache::rewrite_locked() {
    if (out_.is_open()) out_.close();
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    auto tmp = path_;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        for (const auto& [key, rec] : records_) out << to_json_line(rec) << '\n';
        out.flush();
        if (!out) throw Error("write failed on " + tmp.string());
    }
    std::filesystem::rename(tmp, path_);
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) throw Error("cannot open " + path_.string() + " for append");
}

bool MetricCache::contains(const std::string& image_hash, const std::string& fingerprint) const {
    std::lock_guard lock(mutex_);
    return records_.count({image_hash, fingerprint}) != 0;
}

std::optional<ComplexityRecord> MetricCache::find(const std::string& image_hash,
                                                  const std::string& fingerprint) const {
    std::lock_guard lock(mutex_);
    const auto it = records_.find({image_hash, fingerprint});
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

void MetricCache::append(const ComplexityRecord& rec) {
    if (mode_ == Mode::ReadOnly) throw Error("metric cache opened read-only");
    const std::string line = to_json_line(rec) + '\n';
    std::lock_guard lock(mutex_);
    out_ << line;
    out_.flush();
    if (!out_) throw Error("append failed on " + path_.string());
    records_.insert_or_assign(CacheKey{rec.image_hash, rec.config_fingerprint}, rec);
}

void MetricCache::compact() {
    if (mode_ == Mode::ReadOnly) throw Error("metric cache opened read-only");
    std::lock_guard lock(mutex_);
    rewrite_locked();
}

std::vector<ComplexityRecord> MetricCache::records(const std::string& fingerprint) const {
    std::lock_guard lock(mutex_);
    std::vector<ComplexityRecord> out;
    for (const auto& [key, rec] : records_) {
        if (key.second == fingerprint) out.push_back(rec);
    }
    return out;
}

std::size_t MetricCache::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

}  // namespace covercx
