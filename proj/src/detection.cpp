#include "covercx/detection.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "covercx/errors.hpp"

namespace covercx::detection {

namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 80> kCocoClasses{
    "person",        "bicycle",      "car",           "motorcycle",    "airplane",
    "bus",           "train",        "truck",         "boat",          "traffic light",
    "fire hydrant",  "stop sign",    "parking meter", "bench",         "bird",
    "cat",           "dog",          "horse",         "sheep",         "cow",
    "elephant",      "bear",         "zebra",         "giraffe",       "backpack",
    "umbrella",      "handbag",      "tie",           "suitcase",      "frisbee",
    "skis",          "snowboard",    "sports ball",   "kite",          "baseball bat",
    "baseball glove", "skateboard",  "surfboard",     "tennis racket", "bottle",
    "wine glass",    "cup",          "fork",          "knife",         "spoon",
    "bowl",          "banana",       "apple",         "sandwich",      "orange",
    "broccoli",      "carrot",       "hot dog",       "pizza",         "donut",
    "cake",          "chair",        "couch",         "potted plant",  "bed",
    "dining table",  "toilet",       "tv",            "laptop",        "mouse",
    "remote",        "keyboard",     "cell phone",    "microwave",     "oven",
    "toaster",       "sink",         "refrigerator",  "book",          "clock",
    "vase",          "scissors",     "teddy bear",    "hair drier",    "toothbrush",
};

DetectionRecord parse_record(const std::string& line, std::size_t lineno) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(lineno, e.what());
    }
    if (!j.is_object()) throw ParseError(lineno, "record must be a JSON object");
    if (!j.contains("image_id") || !j["image_id"].is_string()) {
        throw ParseError(lineno, "missing string field \"image_id\"");
    }
    if (!j.contains("detections") || !j["detections"].is_array()) {
        throw ParseError(lineno, "missing array field \"detections\"");
    }
    DetectionRecord rec;
    rec.image_id = j["image_id"].get<std::string>();
    if (rec.image_id.empty()) throw ParseError(lineno, "empty image_id");
    for (const auto& d : j["detections"]) {
        if (!d.is_object() || !d.contains("class") || !d["class"].is_string() ||
            !d.contains("conf") || !d["conf"].is_number()) {
            throw ParseError(lineno, "detection needs string \"class\" and numeric \"conf\"");
        }
        Detection det;
        det.class_name = d["class"].get<std::string>();
        det.confidence = d["conf"].get<double>();
        if (!is_coco_class(det.class_name)) {
            throw UnknownClass("line " + std::to_string(lineno) + ": unknown class \"" +
                               det.class_name + "\"");
        }
        if (!(det.confidence >= 0.0 && det.confidence <= 1.0)) {
            throw ParseError(lineno, "confidence outside [0, 1]");
        }
        if (d.contains("bbox") && !d["bbox"].is_null()) {
            const auto& b = d["bbox"];
            if (!b.is_array() || b.size() != 4 ||
                !std::all_of(b.begin(), b.end(), [](const json& v) { return v.is_number(); })) {
                throw ParseError(lineno, "bbox must be an array of 4 numbers");
            }
            det.bbox = std::array<double, 4>{b[0].get<double>(), b[1].get<double>(),
                                             b[2].get<double>(), b[3].get<double>()};
        }
        rec.detections.push_back(std::move(det));
    }
    return rec;
}

}  // namespace

std::span<const std::string_view> coco_classes() { return kCocoClasses; }

bool is_coco_class(std::string_view name) {
    return std::find(kCocoClasses.begin(), kCocoClasses.end(), name) != kCocoClasses.end();
}

std::vector<DetectionRecord> load_detections(std::istream& in) {
    std::vector<DetectionRecord> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        auto rec = parse_record(line, lineno);
        if (!seen.insert(rec.image_id).second) {
            throw DuplicateImage("line " + std::to_string(lineno) + ": duplicate image_id " +
                                 rec.image_id);
        }
        out.push_back(std::move(rec));
    }
    return out;
}

void write_detections(std::ostream& out, std::span<const DetectionRecord> records) {
    for (const auto& rec : records) {
        json dets = json::array();
        for (const auto& d : rec.detections) {
            json jd = {{"class", d.class_name}, {"conf", d.confidence}};
            if (d.bbox) jd["bbox"] = *d.bbox;
            dets.push_back(std::move(jd));
        }
        out << json{{"image_id", rec.image_id}, {"detections", std::move(dets)}}.dump() << '\n';
    }
}

SemanticSummary summarize(const DetectionRecord& rec, double tau) {
    SemanticSummary s;
    s.image_id = rec.image_id;
    for (const auto& d : rec.detections) {
        if (d.confidence >= tau) {
            ++s.classes[d.class_name];
            ++s.object_count;
        }
    }
    return s;
}

std::vector<ClassShare> class_distribution(std::span<const SemanticSummary* const> group,
                                           bool count_repeated) {
    std::map<std::string, std::size_t> counts;
    for (const SemanticSummary* s : group) {
        if (s->object_count == 0) {
            ++counts[std::string(kNoObjects)];
            continue;
        }
        for (const auto& [name, n] : s->classes) counts[name] += count_repeated ? n : 1;
    }
    std::size_t total = 0;
    for (const auto& [name, n] : counts) total += n;

    std::vector<ClassShare> rows;
    rows.reserve(counts.size());
    for (const auto& [name, n] : counts) {
        rows.push_back({name, n, total == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(total)});
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const ClassShare& a, const ClassShare& b) { return a.count > b.count; });
    return rows;
}

}  // namespace covercx::detection
