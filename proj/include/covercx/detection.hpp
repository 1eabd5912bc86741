#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace covercx::detection {

inline constexpr double kDefaultTau = 0.25;

/// Label used for images without any detection above threshold.
inline constexpr std::string_view kNoObjects = "no_objects";

/// The 80 COCO class names, in the canonical COCO/YOLO order.
std::span<const std::string_view> coco_classes();
bool is_coco_class(std::string_view name);

struct Detection {
    std::string class_name;
    double confidence = 0.0;
    std::optional<std::array<double, 4>> bbox;  // x, y, w, h; carried but unused

    friend bool operator==(const Detection&, const Detection&) = default;
};

struct DetectionRecord {
    std::string image_id;
    std::vector<Detection> detections;

    friend bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

struct SemanticSummary {
    std::string image_id;
    std::size_t object_count = 0;
    std::map<std::string, std::size_t> classes;  // multiset as class -> multiplicity
};

/// Reads newline-delimited JSON records of the form
///   {"image_id": str, "detections": [{"class": str, "conf": float, "bbox": [x,y,w,h]}]}
/// Blank lines are ignored. Throws ParseError (with the 1-based line
/// number), UnknownClass or DuplicateImage.
std::vector<DetectionRecord> load_detections(std::istream& in);

/// Writes records in the same wire format, one per line.
void write_detections(std::ostream& out, std::span<const DetectionRecord> records);

/// Keeps detections with confidence >= tau.
SemanticSummary summarize(const DetectionRecord& rec, double tau = kDefaultTau);

struct ClassShare {
    std::string class_name;  // a COCO class or kNoObjects
    std::size_t count = 0;
    double proportion = 0.0;
};

/// Share of each object class within a group of images, plus the share of
/// images with no objects. With count_repeated, every instance counts;
/// otherwise a class counts once per image. Rows are ordered by descending
/// count, then name; proportions sum to 1 for non-empty groups.
std::vector<ClassShare> class_distribution(std::span<const SemanticSummary* const> group,
                                           bool count_repeated = true);

}  // namespace covercx::detection
